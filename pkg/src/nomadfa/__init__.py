"""Advice DFAs, nominal DFAs over the equality symmetry, and exact
Littlestone/consistency dimensions with an (EQ+MQ) teacher/learner harness."""

__version__ = "0.1.0"

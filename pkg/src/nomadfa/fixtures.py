"""Shipped nominal automata over the atoms alphabet.

All fixtures share the alphabet of plain atoms and are built from concrete
step functions; compile derives the orbit-wise transition tables and rejects
non-equivariant steps.
"""

from __future__ import annotations

from .nominal import Element, NominalSet, SupportRepresentation
from .nominal_dfa import NominalDFA


def atoms_alphabet() -> NominalSet:
    return NominalSet.atoms_set()


def aa_language() -> NominalDFA:
    """Accept exactly the two-letter words whose letters are equal."""
    states = NominalSet((
        SupportRepresentation.tuples(0),   # start
        SupportRepresentation.tuples(1),   # saw one letter, remembers it
        SupportRepresentation.tuples(0),   # accepted "a a"
        SupportRepresentation.tuples(0),   # dead
    ))

    def delta(q: Element, a: Element) -> Element:
        atom = a.atoms[0]
        if q.orbit == 0:
            return states.element(1, (atom,))
        if q.orbit == 1:
            return states.element(2, ()) if atom == q.atoms[0] else states.element(3, ())
        return states.element(3, ())

    return NominalDFA.compile(atoms_alphabet(), states, 0, {2}, delta)


def empty_language() -> NominalDFA:
    states = NominalSet((SupportRepresentation.tuples(0),))
    return NominalDFA.compile(atoms_alphabet(), states, 0, set(),
                              lambda q, a: states.element(0, ()))


def full_language() -> NominalDFA:
    states = NominalSet((SupportRepresentation.tuples(0),))
    return NominalDFA.compile(atoms_alphabet(), states, 0, {0},
                              lambda q, a: states.element(0, ()))


def first_equals_last() -> NominalDFA:
    """Accept the nonempty words whose first and last letters coincide."""
    states = NominalSet((
        SupportRepresentation.tuples(0),   # start
        SupportRepresentation.tuples(1),   # last letter equals the first
        SupportRepresentation.tuples(1),   # last letter differs from the first
    ))

    def delta(q: Element, a: Element) -> Element:
        atom = a.atoms[0]
        if q.orbit == 0:
            return states.element(1, (atom,))
        first = q.atoms[0]
        return states.element(1 if atom == first else 2, (first,))

    return NominalDFA.compile(atoms_alphabet(), states, 0, {1}, delta)


def repeated_pair_language() -> NominalDFA:
    """Accept exactly the four-letter words x y x y with x != y.

    The states reached after two letters carry both atoms, so the minimal
    automaton has nominal dimension 2.
    """
    states = NominalSet((
        SupportRepresentation.tuples(0),   # start
        SupportRepresentation.tuples(1),   # saw x
        SupportRepresentation.tuples(2),   # saw x y
        SupportRepresentation.tuples(2),   # saw x y x
        SupportRepresentation.tuples(0),   # accepted x y x y
        SupportRepresentation.tuples(0),   # dead
    ))

    def delta(q: Element, a: Element) -> Element:
        atom = a.atoms[0]
        if q.orbit == 0:
            return states.element(1, (atom,))
        if q.orbit == 1:
            x = q.atoms[0]
            return states.element(2, (x, atom)) if atom != x else states.element(5, ())
        if q.orbit == 2:
            x, y = q.atoms
            return states.element(3, (x, y)) if atom == x else states.element(5, ())
        if q.orbit == 3:
            x, y = q.atoms
            return states.element(4, ()) if atom == y else states.element(5, ())
        return states.element(5, ())

    return NominalDFA.compile(atoms_alphabet(), states, 0, {4}, delta)


def aa_with_unreachable_orbit() -> NominalDFA:
    """The aa language with a fifth orbit no transition ever targets."""
    states = NominalSet((
        SupportRepresentation.tuples(0),
        SupportRepresentation.tuples(1),
        SupportRepresentation.tuples(0),
        SupportRepresentation.tuples(0),
        SupportRepresentation.tuples(0),   # unreachable
    ))

    def delta(q: Element, a: Element) -> Element:
        atom = a.atoms[0]
        if q.orbit == 0:
            return states.element(1, (atom,))
        if q.orbit == 1:
            return states.element(2, ()) if atom == q.atoms[0] else states.element(3, ())
        return states.element(3, ())

    return NominalDFA.compile(atoms_alphabet(), states, 0, {2}, delta)


def aa_with_split_sinks() -> NominalDFA:
    """The aa language with two behaviorally equal dead orbits, both reachable."""
    states = NominalSet((
        SupportRepresentation.tuples(0),
        SupportRepresentation.tuples(1),
        SupportRepresentation.tuples(0),
        SupportRepresentation.tuples(0),   # dead, entered on a failed compare
        SupportRepresentation.tuples(0),   # dead, entered after acceptance
    ))

    def delta(q: Element, a: Element) -> Element:
        atom = a.atoms[0]
        if q.orbit == 0:
            return states.element(1, (atom,))
        if q.orbit == 1:
            return states.element(2, ()) if atom == q.atoms[0] else states.element(3, ())
        if q.orbit == 2:
            return states.element(4, ())
        return states.element(q.orbit, ())

    return NominalDFA.compile(atoms_alphabet(), states, 0, {2}, delta)


def padded_empty_language() -> NominalDFA:
    """The empty language spread over three behaviorally equal orbits."""
    states = NominalSet((
        SupportRepresentation.tuples(0),
        SupportRepresentation.tuples(1),
        SupportRepresentation.tuples(0),
    ))

    def delta(q: Element, a: Element) -> Element:
        if q.orbit == 0:
            return states.element(1, (a.atoms[0],))
        return states.element(2, ())

    return NominalDFA.compile(atoms_alphabet(), states, 0, set(), delta)


FIXTURE_BUILDERS = {
    "aa": aa_language,
    "empty": empty_language,
    "full": full_language,
    "first_last": first_equals_last,
    "repeated_pair": repeated_pair_language,
}


def fixture(name: str) -> NominalDFA:
    try:
        return FIXTURE_BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; have {sorted(FIXTURE_BUILDERS)}") from None

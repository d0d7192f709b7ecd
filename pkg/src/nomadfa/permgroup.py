"""Permutations of [k] = {1..k}, subgroup enumeration, and conjugacy of subgroups.

Points are 1-based throughout this module; the atom world (0-based) converts
at the nominal.canonicalize boundary.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache


class DegreeMismatchError(ValueError):
    """Raised when permutations or subgroups of different degrees are mixed."""


class UnsupportedDegreeError(ValueError):
    """Raised when a full enumeration is requested beyond the supported degree."""


MAX_CLOSURE_DEGREE = 8
MAX_ENUMERATION_DEGREE = 5

_CYCLE_RE = re.compile(r"\(([0-9 ]+)\)")


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of {1..k}, stored as the tuple of images of 1..k."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation of [{len(self.images)}]: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(1, degree + 1)))

    @classmethod
    def transposition(cls, degree: int, a: int, b: int) -> "Permutation":
        images = list(range(1, degree + 1))
        images[a - 1], images[b - 1] = b, a
        return cls(tuple(images))

    def apply(self, point: int) -> int:
        return self.images[point - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self * other)(i) = self(other(i))."""
        if self.degree != other.degree:
            raise DegreeMismatchError(f"degree {self.degree} vs {other.degree}")
        return Permutation(tuple(self.images[i - 1] for i in other.images))

    def inverse(self) -> "Permutation":
        images = [0] * self.degree
        for point, image in enumerate(self.images, start=1):
            images[image - 1] = point
        return Permutation(tuple(images))

    def is_identity(self) -> bool:
        return all(image == point for point, image in enumerate(self.images, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its least point, sorted by that point."""
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            point = self.apply(start)
            while point != start:
                cycle.append(point)
                seen.add(point)
                point = self.apply(point)
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def to_cycle_string(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "id"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)

    @classmethod
    def from_cycle_string(cls, degree: int, text: str) -> "Permutation":
        text = text.strip()
        images = list(range(1, degree + 1))
        if text in ("", "id", "()"):
            return cls(tuple(images))
        if _CYCLE_RE.sub("", text).strip():
            raise ValueError(f"malformed cycle string: {text!r}")
        for group in _CYCLE_RE.findall(text):
            points = [int(tok) for tok in group.split()]
            if len(points) != len(set(points)) or any(not 1 <= p <= degree for p in points):
                raise ValueError(f"invalid cycle {group!r} for degree {degree}")
            for src, dst in zip(points, points[1:] + points[:1]):
                images[src - 1] = dst
        return cls(tuple(images))


def all_permutations(degree: int) -> list[Permutation]:
    """All of Sym([degree]) in lexicographic image order."""
    return [Permutation(images) for images in itertools.permutations(range(1, degree + 1))]


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of Sym([degree]), stored extensionally."""

    degree: int
    elements: frozenset[Permutation]

    def __post_init__(self):
        if any(p.degree != self.degree for p in self.elements):
            raise DegreeMismatchError("subgroup elements must share the subgroup degree")
        if Permutation.identity(self.degree) not in self.elements:
            raise ValueError("subgroup must contain the identity")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Permutation) -> bool:
        return p in self.elements

    def sort_key(self) -> tuple:
        return (len(self.elements), tuple(sorted(p.images for p in self.elements)))

    def sorted_elements(self) -> list[Permutation]:
        return sorted(self.elements, key=lambda p: p.images)

    def conjugate_by(self, rho: Permutation) -> "Subgroup":
        if rho.degree != self.degree:
            raise DegreeMismatchError("conjugator degree mismatch")
        rho_inv = rho.inverse()
        return Subgroup(self.degree, frozenset(rho.compose(p).compose(rho_inv) for p in self.elements))

    def to_cycle_strings(self) -> list[str]:
        return [p.to_cycle_string() for p in self.sorted_elements()]

    @classmethod
    def trivial(cls, degree: int) -> "Subgroup":
        return cls(degree, frozenset({Permutation.identity(degree)}))

    @classmethod
    def symmetric(cls, degree: int) -> "Subgroup":
        return cls(degree, frozenset(all_permutations(degree)))

    @classmethod
    def generated_by(cls, degree: int, cycle_strings: list[str] | tuple[str, ...]) -> "Subgroup":
        gens = {Permutation.from_cycle_string(degree, s) for s in cycle_strings}
        return subgroup_closure(gens, degree=degree)


@dataclass(frozen=True)
class ConjugacyClassTable:
    """Subgroups of Sym([degree]) partitioned into conjugacy classes.

    Each inner list starts with its canonical representative (the least
    subgroup in the canonical order).
    """

    degree: int
    classes: tuple[tuple[Subgroup, ...], ...]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def subgroup_count(self) -> int:
        return sum(len(c) for c in self.classes)

    def representatives(self) -> list[Subgroup]:
        return [c[0] for c in self.classes]


def subgroup_closure(generators: set[Permutation] | frozenset[Permutation],
                     degree: int | None = None) -> Subgroup:
    """Smallest subgroup containing the generators.

    With no generators the degree must be supplied (the trivial group has no
    witnesses of its degree).
    """
    generators = set(generators)
    if not generators:
        if degree is None:
            raise ValueError("degree required for an empty generator set")
        return Subgroup.trivial(degree)
    degrees = {p.degree for p in generators}
    if len(degrees) != 1:
        raise DegreeMismatchError(f"mixed degrees in generators: {sorted(degrees)}")
    (k,) = degrees
    if degree is not None and degree != k:
        raise DegreeMismatchError(f"generators have degree {k}, expected {degree}")
    if k > MAX_CLOSURE_DEGREE:
        raise UnsupportedDegreeError(f"closure supported up to degree {MAX_CLOSURE_DEGREE}, got {k}")
    # Orbit algorithm; for finite groups closure under products alone suffices.
    elements = {Permutation.identity(k)} | generators
    frontier = list(elements)
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = x.compose(g)
                if y not in elements:
                    elements.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(k, frozenset(elements))


class _SymTable:
    """Sym([k]) with integer element ids and a multiplication table."""

    def __init__(self, k: int):
        self.k = k
        self.perms = all_permutations(k)
        self.index = {p: i for i, p in enumerate(self.perms)}
        self.identity = self.index[Permutation.identity(k)]
        n = len(self.perms)
        self.mult = [[self.index[self.perms[i].compose(self.perms[j])] for j in range(n)]
                     for i in range(n)]
        self.inv = [self.index[p.inverse()] for p in self.perms]

    def closure(self, gens: tuple[int, ...]) -> frozenset[int]:
        elements = {self.identity, *gens}
        frontier = list(elements)
        while frontier:
            nxt = []
            for x in frontier:
                row = self.mult[x]
                for g in gens:
                    y = row[g]
                    if y not in elements:
                        elements.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(elements)

    def conjugate(self, subgroup: frozenset[int], rho: int) -> frozenset[int]:
        rho_inv = self.inv[rho]
        row = self.mult[rho]
        return frozenset(self.mult[row[s]][rho_inv] for s in subgroup)

    def to_subgroup(self, ids: frozenset[int]) -> Subgroup:
        return Subgroup(self.k, frozenset(self.perms[i] for i in ids))


@lru_cache(maxsize=None)
def _sym_table(k: int) -> _SymTable:
    return _SymTable(k)


def _check_enumeration_degree(k: int):
    if not 1 <= k <= MAX_ENUMERATION_DEGREE:
        raise UnsupportedDegreeError(
            f"full subgroup enumeration supported for 1 <= k <= {MAX_ENUMERATION_DEGREE}, got {k}")


@lru_cache(maxsize=None)
def _enumerate_subgroup_ids(k: int) -> tuple[frozenset[int], ...]:
    """All subgroups of Sym([k]) as element-id sets, canonically ordered.

    Cyclic extension: every subgroup arises from a smaller one by adjoining a
    single generator, so growing the trivial group by one cyclic subgroup at
    a time reaches everything.
    """
    table = _sym_table(k)
    n = len(table.perms)
    cyclic: dict[frozenset[int], int] = {}
    for g in range(n):
        c = table.closure((g,))
        cyclic.setdefault(c, g)
    trivial = frozenset({table.identity})
    found: dict[frozenset[int], tuple[int, ...]] = {trivial: ()}
    queue = [trivial]
    while queue:
        current = queue.pop()
        gens = found[current]
        for c, g in cyclic.items():
            if c <= current:
                continue
            extended = table.closure(gens + (g,))
            if extended not in found:
                found[extended] = gens + (g,)
                queue.append(extended)

    def key(ids: frozenset[int]) -> tuple:
        return (len(ids), tuple(sorted(table.perms[i].images for i in ids)))

    return tuple(sorted(found, key=key))


def enumerate_subgroups(k: int) -> list[Subgroup]:
    """Every subgroup of Sym([k]) exactly once, in canonical order."""
    _check_enumeration_degree(k)
    table = _sym_table(k)
    return [table.to_subgroup(ids) for ids in _enumerate_subgroup_ids(k)]


def subgroup_conjugacy_classes(k: int) -> ConjugacyClassTable:
    """Partition of enumerate_subgroups(k) into Sym([k])-conjugacy classes."""
    _check_enumeration_degree(k)
    table = _sym_table(k)
    all_ids = _enumerate_subgroup_ids(k)
    seen: set[frozenset[int]] = set()
    classes = []
    for ids in all_ids:  # canonical order, so each class representative is least
        if ids in seen:
            continue
        orbit = {table.conjugate(ids, rho) for rho in range(len(table.perms))}
        seen |= orbit

        def key(member: frozenset[int]) -> tuple:
            return (len(member), tuple(sorted(table.perms[i].images for i in member)))

        rest = sorted((m for m in orbit if m != ids), key=key)
        classes.append(tuple(table.to_subgroup(m) for m in [ids, *rest]))
    return ConjugacyClassTable(k, tuple(classes))


def are_conjugate_subgroups(s: Subgroup, t: Subgroup) -> tuple[bool, Permutation | None]:
    """Whether rho * s * rho^-1 = t for some rho, with a witness rho."""
    if s.degree != t.degree:
        raise DegreeMismatchError(f"degree {s.degree} vs {t.degree}")
    if s.order != t.order:
        return False, None
    if s.elements == t.elements:
        return True, Permutation.identity(s.degree)
    for rho in all_permutations(s.degree):
        if s.conjugate_by(rho).elements == t.elements:
            return True, rho
    return False, None

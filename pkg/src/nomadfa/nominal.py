"""Orbit-finite nominal sets over the equality symmetry.

Atoms are the natural numbers (0-based); a single orbit is presented as a
support representation (k, S): k-tuples of pairwise-distinct atoms modulo a
subgroup S of Sym([k]), where the class of a tuple t consists of the
reorderings t . tau for tau in S.  Group elements are finitely supported
permutations of atoms; nothing in this module ever needs a permutation that
moves infinitely many atoms, because all supports are finite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .permgroup import (
    Permutation,
    Subgroup,
    all_permutations,
    are_conjugate_subgroups,
    subgroup_closure,
    subgroup_conjugacy_classes,
)


class ArityMismatchError(ValueError):
    """Raised when a tuple and a symmetry subgroup disagree on arity."""


class InvalidRelationError(ValueError):
    """Raised when a relation oracle fails the sampled equivalence or
    equivariance checks."""


@dataclass(frozen=True)
class AtomPermutation:
    """A finitely supported permutation of the atoms.

    Stored as the graph of its non-fixed points; the domain and range of
    that finite map coincide as sets.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        sources = [a for a, _ in self.pairs]
        targets = [b for _, b in self.pairs]
        if len(set(sources)) != len(sources) or set(sources) != set(targets):
            raise ValueError(f"not a finitely supported bijection: {self.pairs}")
        if any(a < 0 or b < 0 for a, b in self.pairs):
            raise ValueError("atoms are non-negative")

    @classmethod
    def from_mapping(cls, mapping: dict[int, int]) -> "AtomPermutation":
        moved = tuple(sorted((a, b) for a, b in mapping.items() if a != b))
        return cls(moved)

    @classmethod
    def identity(cls) -> "AtomPermutation":
        return cls(())

    @classmethod
    def transposition(cls, a: int, b: int) -> "AtomPermutation":
        if a == b:
            return cls(())
        return cls(tuple(sorted([(a, b), (b, a)])))

    @classmethod
    def extend_injection(cls, mapping: dict[int, int]) -> "AtomPermutation":
        """Complete an injection to a permutation, matching the unmatched
        source and target atoms in increasing order."""
        if len(set(mapping.values())) != len(mapping):
            raise ValueError(f"not injective: {mapping}")
        sources = set(mapping)
        targets = set(mapping.values())
        full = dict(mapping)
        for src, dst in zip(sorted(targets - sources), sorted(sources - targets)):
            full[src] = dst
        return cls.from_mapping(full)

    def apply(self, atom: int) -> int:
        for a, b in self.pairs:
            if a == atom:
                return b
        return atom

    def domain(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.pairs)

    def compose(self, other: "AtomPermutation") -> "AtomPermutation":
        """self after other."""
        atoms = {a for a, _ in self.pairs} | {a for a, _ in other.pairs}
        return AtomPermutation.from_mapping({a: self.apply(other.apply(a)) for a in atoms})

    def inverse(self) -> "AtomPermutation":
        return AtomPermutation(tuple(sorted((b, a) for a, b in self.pairs)))


@dataclass(frozen=True)
class SupportRepresentation:
    """A single-orbit nominal set [k, S]: distinct k-tuples of atoms mod S."""

    arity: int
    symmetry: Subgroup

    def __post_init__(self):
        if self.symmetry.degree != self.arity:
            raise ArityMismatchError(
                f"symmetry degree {self.symmetry.degree} != arity {self.arity}")

    @classmethod
    def tuples(cls, arity: int) -> "SupportRepresentation":
        """The set of distinct arity-tuples of atoms with trivial symmetry."""
        return cls(arity, Subgroup.trivial(arity))


@dataclass(frozen=True, order=True)
class Element:
    """An element of an orbit-finite set: orbit index plus canonical tuple."""

    orbit: int
    atoms: tuple[int, ...]


def reorder(t: tuple[int, ...], tau: Permutation) -> tuple[int, ...]:
    """The tuple b with b_i = t_{tau(i)}."""
    return tuple(t[tau.apply(i) - 1] for i in range(1, len(t) + 1))


def canonicalize(t: tuple[int, ...], symmetry: Subgroup) -> tuple[int, ...]:
    """Lexicographically least tuple in the equivalence class of t mod symmetry."""
    if len(t) != symmetry.degree:
        raise ArityMismatchError(f"tuple arity {len(t)} != symmetry degree {symmetry.degree}")
    if len(set(t)) != len(t) or any(a < 0 for a in t):
        raise ValueError(f"not a distinct tuple of atoms: {t}")
    return min(reorder(t, tau) for tau in symmetry.elements)


def fresh_atom(*atom_groups) -> int:
    """Smallest atom strictly above everything mentioned."""
    used = [a for group in atom_groups for a in group]
    return max(used) + 1 if used else 0


@dataclass(frozen=True)
class NominalSet:
    """An orbit-finite nominal set: an ordered disjoint union of single orbits."""

    orbits: tuple[SupportRepresentation, ...]

    def __post_init__(self):
        if not self.orbits:
            raise ValueError("an orbit-finite set needs at least one orbit")

    @classmethod
    def atoms_set(cls) -> "NominalSet":
        """The alphabet of plain atoms."""
        return cls((SupportRepresentation.tuples(1),))

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)

    @property
    def dimension(self) -> int:
        return max(rep.arity for rep in self.orbits)

    def element(self, orbit: int, atoms: tuple[int, ...] | list[int]) -> Element:
        rep = self.orbits[orbit]
        return Element(orbit, canonicalize(tuple(atoms), rep.symmetry))

    def canonical_rep(self, orbit: int) -> Element:
        return self.element(orbit, tuple(range(self.orbits[orbit].arity)))

    def act(self, pi: AtomPermutation, x: Element) -> Element:
        return self.element(x.orbit, tuple(pi.apply(a) for a in x.atoms))

    def elements_over(self, orbit: int, pool) -> list[Element]:
        """All elements of one orbit realizable with atoms from the pool."""
        rep = self.orbits[orbit]
        seen = {canonicalize(t, rep.symmetry) for t in itertools.permutations(sorted(pool), rep.arity)}
        return [Element(orbit, atoms) for atoms in sorted(seen)]

    def all_elements_over(self, pool) -> list[Element]:
        return [x for orbit in range(self.orbit_count) for x in self.elements_over(orbit, pool)]

    def least_support(self, x: Element) -> frozenset[int]:
        """The least support of x.

        An atom b of the tuple lies in the least support iff swapping b with a
        fresh atom moves x; atoms outside the tuple never do.  Which fresh atom
        is used does not matter: two fresh choices differ by a transposition
        fixing every tuple atom.
        """
        fresh = fresh_atom(x.atoms)
        return frozenset(
            a for a in x.atoms
            if self.act(AtomPermutation.transposition(a, fresh), x) != x
        )

    def contains(self, x: Element) -> bool:
        if not 0 <= x.orbit < self.orbit_count:
            return False
        rep = self.orbits[x.orbit]
        if len(x.atoms) != rep.arity or len(set(x.atoms)) != rep.arity:
            return False
        return x.atoms == canonicalize(x.atoms, rep.symmetry)


@dataclass(frozen=True)
class EquivariantMap:
    """An equivariant function between orbit-finite sets.

    Per source orbit: a target orbit plus an injection u from target tuple
    positions into source tuple positions (0-based); the image of an element
    selects the source atoms along u and canonicalizes in the target orbit.
    """

    source: NominalSet
    target: NominalSet
    cases: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        if len(self.cases) != self.source.orbit_count:
            raise ValueError("one case per source orbit required")

    def apply(self, x: Element) -> Element:
        target_orbit, u = self.cases[x.orbit]
        return self.target.element(target_orbit, tuple(x.atoms[p] for p in u))

    def validate(self):
        """Check the compatibility condition: for every sigma in the source
        symmetry there is tau in the target symmetry with sigma o u = u o tau."""
        for orbit, (target_orbit, u) in enumerate(self.cases):
            s = self.source.orbits[orbit].symmetry
            t = self.target.orbits[target_orbit].symmetry
            if len(u) != t.degree or len(set(u)) != len(u):
                raise ValueError(f"case {orbit}: u must be an injection of arity {t.degree}")
            if any(not 0 <= p < s.degree for p in u):
                raise ValueError(f"case {orbit}: u positions out of range")
            for sigma in s.elements:
                if not any(
                    all(sigma.apply(u[j - 1] + 1) == u[tau.apply(j) - 1] + 1
                        for j in range(1, t.degree + 1))
                    for tau in t.elements
                ):
                    raise ValueError(
                        f"case {orbit}: injection {u} is not equivariant "
                        f"(no tau matches sigma = {sigma.to_cycle_string()})")
        return self


def fN_pair(k1: int, k2: int) -> int:
    """Number of orbits of the product of the distinct-k1-tuples and
    distinct-k2-tuples of atoms, by the closed-form sum over the overlap size."""
    if k1 < 0 or k2 < 0:
        raise ValueError("arities must be non-negative")
    if k1 < k2:
        k1, k2 = k2, k1
    return sum(math.comb(k1, r) * math.comb(k2, r) * math.factorial(r) for r in range(k2 + 1))


def _joint_key_and_renaming(sets: tuple[NominalSet, ...], elems: tuple[Element, ...]):
    """Canonical form of a tuple of elements under a joint atom renaming.

    Minimizes the per-element canonical tuples over all bijections of the
    occurring atoms onto {0..n-1}; two element tuples are in the same orbit of
    the pointwise action iff their canonical forms coincide.  Returns the key
    and one minimizing renaming (as a dict).
    """
    atoms = sorted({a for e in elems for a in e.atoms})
    best_key = None
    best_rho = None
    for images in itertools.permutations(range(len(atoms))):
        rho = dict(zip(atoms, images))
        key = tuple(
            (e.orbit, canonicalize(tuple(rho[a] for a in e.atoms), s.orbits[e.orbit].symmetry))
            for s, e in zip(sets, elems)
        )
        if best_key is None or key < best_key:
            best_key, best_rho = key, rho
    return best_key, best_rho


def joint_orbit_key(sets: tuple[NominalSet, ...], elems: tuple[Element, ...]):
    return _joint_key_and_renaming(sets, elems)[0]


def _stabilizer(arity: int, atoms: tuple[int, ...], fixes) -> Subgroup:
    """Subgroup of Sym([arity]) of the tuple-position permutations whose induced
    atom permutation (atoms[m] -> atoms[tau(m)]) satisfies the predicate."""
    members = set()
    for tau in all_permutations(arity):
        rho = AtomPermutation.from_mapping(
            {atoms[m - 1]: atoms[tau.apply(m) - 1] for m in range(1, arity + 1)})
        if fixes(rho):
            members.add(tau)
    group = Subgroup(arity, frozenset(members))
    # a stabilizer is automatically closed; verify to catch bad predicates
    for a in members:
        for b in members:
            if a.compose(b) not in members:
                raise InvalidRelationError("stabilizer predicate is not a congruence")
    return group


@dataclass(frozen=True)
class ProductOrbit:
    """One orbit of a binary product, anchored at its canonical pair."""

    source_pair: tuple[int, int]
    anchor: tuple[Element, Element]
    rep: SupportRepresentation


@dataclass(frozen=True, eq=False)
class ProductSet:
    """The product of two orbit-finite sets with the pointwise action.

    The anchor of each orbit uses atoms exactly {0..k-1}; the orbit is then
    [k, S] for S the joint stabilizer of the anchor pair, and arbitrary pairs
    are located by joint canonicalization.
    """

    left: NominalSet
    right: NominalSet
    set: NominalSet
    orbit_infos: tuple[ProductOrbit, ...]
    _lookup: dict = field(repr=False)

    def locate(self, x: Element, y: Element) -> Element:
        key, rho = _joint_key_and_renaming((self.left, self.right), (x, y))
        index = self._lookup[key]
        info = self.orbit_infos[index]
        inv = {image: atom for atom, image in rho.items()}
        return self.set.element(index, tuple(inv[a] for a in range(info.rep.arity)))

    def split(self, e: Element) -> tuple[Element, Element]:
        info = self.orbit_infos[e.orbit]
        phi = AtomPermutation.extend_injection(dict(enumerate(e.atoms)))
        return (self.left.act(phi, info.anchor[0]), self.right.act(phi, info.anchor[1]))

    def cases_for(self, left_orbit: int, right_orbit: int) -> list[int]:
        return [i for i, info in enumerate(self.orbit_infos)
                if info.source_pair == (left_orbit, right_orbit)]


def orbits_of_product(left: NominalSet, right: NominalSet) -> ProductSet:
    """Enumerate the orbits of left x right under the pointwise action.

    An atom pool of size k1 + k2 realizes every orbit of a pair of orbits of
    arities k1 and k2: a pair's atoms number at most k1 + k2, and renaming
    them into the pool is an atom permutation, which preserves orbits.
    """
    infos: list[ProductOrbit] = []
    lookup: dict = {}
    for i, left_rep in enumerate(left.orbits):
        for j, right_rep in enumerate(right.orbits):
            pool = range(left_rep.arity + right_rep.arity)
            keys = sorted({
                joint_orbit_key((left, right), (x, y))
                for x in left.elements_over(i, pool)
                for y in right.elements_over(j, pool)
            })
            for key in keys:
                (_, x_atoms), (_, y_atoms) = key
                anchor = (Element(i, x_atoms), Element(j, y_atoms))
                atoms = tuple(sorted(set(x_atoms) | set(y_atoms)))
                arity = len(atoms)
                sym = _stabilizer(
                    arity, atoms,
                    lambda rho, a=anchor: (left.act(rho, a[0]), right.act(rho, a[1])) == a)
                lookup[key] = len(infos)
                infos.append(ProductOrbit((i, j), anchor, SupportRepresentation(arity, sym)))
    product = NominalSet(tuple(info.rep for info in infos))
    return ProductSet(left, right, product, tuple(infos), lookup)


def equivariant_maps_between(src: SupportRepresentation,
                             dst: SupportRepresentation) -> list[EquivariantMap]:
    """All equivariant maps between two single-orbit sets.

    Injections u from target positions into source positions satisfying the
    compatibility condition, one representative per class modulo the target
    symmetry.
    """
    if src.arity > 6 or dst.arity > 6:
        raise ValueError("map enumeration supported for arities up to 6")
    k, ell = src.arity, dst.arity
    s_elems = src.symmetry.elements
    t_elems = dst.symmetry.elements
    classes = set()
    for u in itertools.permutations(range(k), ell):
        ok = all(
            any(all(sigma.apply(u[j - 1] + 1) == u[tau.apply(j) - 1] + 1
                    for j in range(1, ell + 1))
                for tau in t_elems)
            for sigma in s_elems
        )
        if ok:
            classes.add(min(reorder(u, tau) for tau in t_elems))
    source_set = NominalSet((src,))
    target_set = NominalSet((dst,))
    return [EquivariantMap(source_set, target_set, ((0, u),)).validate()
            for u in sorted(classes)]


def iso_single_orbit(a: SupportRepresentation, b: SupportRepresentation) -> bool:
    """Two single-orbit sets are isomorphic iff equal arity and conjugate symmetries."""
    if a.arity != b.arity:
        return False
    return are_conjugate_subgroups(a.symmetry, b.symmetry)[0]


def count_single_orbit_sets(k: int) -> int:
    """Single-orbit nominal sets of nominal dimension exactly k, up to
    isomorphism: one per conjugacy class of subgroups of Sym([k])."""
    return subgroup_conjugacy_classes(k).class_count


@dataclass(frozen=True, eq=False)
class QuotientResult:
    set: NominalSet
    projection: EquivariantMap
    _anchors: tuple[tuple[Element, tuple[int, ...]], ...]

    def lift(self, q: Element) -> Element:
        """A source element whose class is q."""
        anchor, support = self._anchors[q.orbit]
        pi = AtomPermutation.extend_injection(dict(zip(support, q.atoms)))
        return self.projection.source.act(pi, anchor)


def _validate_relation_oracle(space: NominalSet, relation):
    pool = range(space.dimension + 2)
    sample = space.all_elements_over(pool)[:20]
    for x in sample:
        if not relation(x, x):
            raise InvalidRelationError(f"relation is not reflexive at {x}")
    pair_sample = sample[:12]
    for x in pair_sample:
        for y in pair_sample:
            if relation(x, y) != relation(y, x):
                raise InvalidRelationError(f"relation is not symmetric at {x}, {y}")
    for x in pair_sample:
        for y in pair_sample:
            if not relation(x, y):
                continue
            for z in pair_sample:
                if relation(y, z) and not relation(x, z):
                    raise InvalidRelationError("relation is not transitive")
    fresh = fresh_atom(pool)
    moves = [AtomPermutation.transposition(a, b)
             for a in pool for b in [*pool, fresh] if a < b]
    for x in pair_sample:
        for y in pair_sample:
            for pi in moves:
                if relation(x, y) != relation(space.act(pi, x), space.act(pi, y)):
                    raise InvalidRelationError("relation is not equivariant")


def quotient(space: NominalSet, relation) -> QuotientResult:
    """Quotient an orbit-finite set by an equivariant equivalence oracle.

    The oracle is validated on a bounded sample (full verification of
    equivariance is not decidable from a black box).  Each source orbit maps
    onto one quotient orbit; the class of x is supported by the atoms of x
    that a fresh swap moves out of the class, and the quotient orbit is the
    support representation anchored at the first representative found.
    """
    _validate_relation_oracle(space, relation)
    anchors: list[tuple[Element, tuple[int, ...]]] = []
    reps: list[SupportRepresentation] = []
    cases: list[tuple[int, tuple[int, ...]]] = []
    for orbit in range(space.orbit_count):
        x = space.canonical_rep(orbit)
        fresh = fresh_atom(x.atoms)
        class_support = tuple(sorted(
            a for a in x.atoms
            if not relation(space.act(AtomPermutation.transposition(a, fresh), x), x)))
        target = None
        for t, (anchor, support) in enumerate(anchors):
            if len(support) != len(class_support):
                continue
            for perm in itertools.permutations(class_support):
                pi = AtomPermutation.extend_injection(dict(zip(support, perm)))
                if relation(space.act(pi, anchor), x):
                    target = (t, canonicalize(perm, reps[t].symmetry))
                    break
            if target is not None:
                break
        if target is None:
            arity = len(class_support)
            sym = _stabilizer(arity, class_support,
                              lambda rho, x=x: relation(space.act(rho, x), x))
            reps.append(SupportRepresentation(arity, sym))
            anchors.append((x, class_support))
            target = (len(reps) - 1, canonicalize(class_support, sym))
        cases.append(target)
    quotient_set = NominalSet(tuple(reps))
    projection = EquivariantMap(space, quotient_set, tuple(cases)).validate()
    return QuotientResult(quotient_set, projection, tuple(anchors))


def set_to_record(space: NominalSet) -> dict:
    return {
        "orbits": [
            {"arity": rep.arity, "symmetry": rep.symmetry.to_cycle_strings()}
            for rep in space.orbits
        ]
    }


def set_from_record(record: dict) -> NominalSet:
    reps = []
    for orbit in record["orbits"]:
        arity = int(orbit["arity"])
        generators = {Permutation.from_cycle_string(arity, s) for s in orbit["symmetry"]}
        sym = subgroup_closure(generators, degree=arity)
        reps.append(SupportRepresentation(arity, sym))
    return NominalSet(tuple(reps))


def element_to_record(x: Element) -> dict:
    return {"orbit_index": x.orbit, "atoms": list(x.atoms)}


def element_from_record(space: NominalSet, record: dict) -> Element:
    return space.element(int(record["orbit_index"]), tuple(int(a) for a in record["atoms"]))

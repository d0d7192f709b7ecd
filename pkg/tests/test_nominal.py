import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nomadfa.permgroup import Subgroup
from nomadfa.nominal import (
    AtomPermutation,
    EquivariantMap,
    InvalidRelationError,
    NominalSet,
    SupportRepresentation,
    canonicalize,
    count_single_orbit_sets,
    element_from_record,
    element_to_record,
    equivariant_maps_between,
    fN_pair,
    fresh_atom,
    iso_single_orbit,
    joint_orbit_key,
    orbits_of_product,
    quotient,
    set_from_record,
    set_to_record,
)

ATOMS = NominalSet.atoms_set()
PAIRS = NominalSet((SupportRepresentation.tuples(2),))
UNORDERED_PAIRS = NominalSet((SupportRepresentation(2, Subgroup.symmetric(2)),))
# N x N as a nominal set: the diagonal plus the off-diagonal orbit
N_SQUARED = NominalSet((SupportRepresentation.tuples(1), SupportRepresentation.tuples(2)))


def brute_force_product_orbit_count(k1, k2):
    """Independent oracle: count equality patterns of concatenated distinct
    tuples over a pool of k1 + k2 atoms."""
    pool = range(k1 + k2)
    patterns = set()
    for a in itertools.permutations(pool, k1):
        for b in itertools.permutations(pool, k2):
            renaming = {}
            pattern = []
            for atom in (*a, *b):
                renaming.setdefault(atom, len(renaming))
                pattern.append(renaming[atom])
            patterns.add(tuple(pattern))
    return len(patterns)


def brute_force_is_support(space, x, candidate):
    """candidate supports x iff every transposition of atoms outside it
    (among the tuple atoms and two fresh ones) fixes x."""
    outside = [a for a in x.atoms if a not in candidate]
    fresh = fresh_atom(x.atoms)
    outside += [fresh, fresh + 1]
    return all(
        space.act(AtomPermutation.transposition(a, b), x) == x
        for a, b in itertools.combinations(outside, 2)
    )


def small_atom_permutations():
    return st.permutations(list(range(5))).map(
        lambda images: AtomPermutation.from_mapping(dict(zip(range(5), images))))


def elements_of(space):
    pool = list(range(space.dimension + 3))
    return st.sampled_from(space.all_elements_over(pool))


class TestAtomPermutation:
    def test_identity_and_transposition(self):
        assert AtomPermutation.identity().apply(5) == 5
        swap = AtomPermutation.transposition(3, 7)
        assert swap.apply(3) == 7 and swap.apply(7) == 3 and swap.apply(4) == 4

    @given(small_atom_permutations(), small_atom_permutations())
    def test_compose(self, p, q):
        for atom in range(7):
            assert p.compose(q).apply(atom) == p.apply(q.apply(atom))

    @given(small_atom_permutations())
    def test_inverse(self, p):
        for atom in range(7):
            assert p.inverse().apply(p.apply(atom)) == atom

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            AtomPermutation.from_mapping({0: 1, 2: 1})

    def test_extend_injection_matches_in_increasing_order(self):
        # 0 -> 5 leaves source 5 and target 0 unmatched, so 5 -> 0
        pi = AtomPermutation.extend_injection({0: 5})
        assert pi.apply(0) == 5 and pi.apply(5) == 0
        # sources {0,1} -> {2,3}; unmatched sources of the bijection are 2,3
        pi = AtomPermutation.extend_injection({0: 2, 1: 3})
        assert (pi.apply(2), pi.apply(3)) == (0, 1)


class TestCanonicalize:
    def test_unordered_pair(self):
        assert canonicalize((5, 3), Subgroup.symmetric(2)) == (3, 5)

    def test_trivial_symmetry(self):
        assert canonicalize((5, 3), Subgroup.trivial(2)) == (5, 3)

    def test_cyclic_rotation(self):
        sym = Subgroup.generated_by(3, ["(1 2 3)"])
        assert canonicalize((2, 0, 1), sym) == (0, 1, 2)
        # oracle: apply all rotations explicitly
        rotations = {(2, 0, 1), (0, 1, 2), (1, 2, 0)}
        assert canonicalize((2, 0, 1), sym) == min(rotations)

    def test_idempotent(self):
        sym = Subgroup.generated_by(3, ["(1 2 3)"])
        once = canonicalize((7, 2, 9), sym)
        assert canonicalize(once, sym) == once

    def test_arity_mismatch(self):
        from nomadfa.nominal import ArityMismatchError
        with pytest.raises(ArityMismatchError):
            canonicalize((1, 2, 3), Subgroup.symmetric(2))


class TestAction:
    def test_identity_action(self):
        x = UNORDERED_PAIRS.element(0, (3, 5))
        assert UNORDERED_PAIRS.act(AtomPermutation.identity(), x) == x

    def test_pointwise_image(self):
        x = UNORDERED_PAIRS.element(0, (3, 5))
        swapped = UNORDERED_PAIRS.act(AtomPermutation.transposition(3, 7), x)
        assert swapped == UNORDERED_PAIRS.element(0, (5, 7))

    def test_composition_law_200_random_cases(self):
        rng = random.Random(7)
        spaces = [ATOMS, PAIRS, UNORDERED_PAIRS, N_SQUARED]
        for _ in range(200):
            space = rng.choice(spaces)
            orbit = rng.randrange(space.orbit_count)
            arity = space.orbits[orbit].arity
            atoms = tuple(rng.sample(range(8), arity))
            x = space.element(orbit, atoms)
            images = list(range(8))
            rng.shuffle(images)
            pi = AtomPermutation.from_mapping(dict(zip(range(8), images)))
            rng.shuffle(images)
            rho = AtomPermutation.from_mapping(dict(zip(range(8), images)))
            assert space.act(pi.compose(rho), x) == space.act(pi, space.act(rho, x))

    @given(elements_of(UNORDERED_PAIRS), small_atom_permutations())
    def test_support_size_preserved(self, x, pi):
        space = UNORDERED_PAIRS
        assert len(space.least_support(space.act(pi, x))) == len(space.least_support(x))


class TestLeastSupport:
    def test_unordered_pair(self):
        x = UNORDERED_PAIRS.element(0, (3, 5))
        assert UNORDERED_PAIRS.least_support(x) == {3, 5}

    def test_single_atom(self):
        assert ATOMS.least_support(ATOMS.element(0, (7,))) == {7}

    def test_pair_in_n_squared(self):
        x = N_SQUARED.element(1, (4, 9))
        assert N_SQUARED.least_support(x) == {4, 9}

    @given(elements_of(N_SQUARED))
    def test_agrees_with_brute_force(self, x):
        support = N_SQUARED.least_support(x)
        assert brute_force_is_support(N_SQUARED, x, support)
        for dropped in support:
            assert not brute_force_is_support(N_SQUARED, x, support - {dropped})

    @given(elements_of(UNORDERED_PAIRS))
    def test_moving_one_support_element_moves_x(self, x):
        support = UNORDERED_PAIRS.least_support(x)
        fresh = fresh_atom(x.atoms)
        for a in support:
            tau = AtomPermutation.transposition(a, fresh)
            assert UNORDERED_PAIRS.act(tau, x) != x


class TestFN:
    @pytest.mark.parametrize("k1,k2,value", [
        (1, 1, 2), (1, 0, 1), (2, 1, 3), (2, 2, 7), (3, 2, 13), (3, 3, 34),
    ])
    def test_known_values(self, k1, k2, value):
        assert fN_pair(k1, k2) == value

    def test_argument_order_irrelevant(self):
        assert fN_pair(1, 3) == fN_pair(3, 1)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            fN_pair(-1, 0)

    @pytest.mark.parametrize("k1", range(4))
    def test_matches_brute_force(self, k1):
        for k2 in range(k1 + 1):
            assert fN_pair(k1, k2) == brute_force_product_orbit_count(k1, k2)

    def test_sandwich_bounds(self):
        for k1 in range(7):
            for k2 in range(k1 + 1):
                value = fN_pair(k1, k2)
                lower = math.comb(k1, k2) * math.factorial(k2)
                assert (k1 / math.e) ** k2 <= lower <= value <= (2 * k1) ** k2 or (k1 == k2 == 0)
        assert fN_pair(0, 0) == 1


class TestProducts:
    def test_atoms_squared_has_two_orbits(self):
        product = orbits_of_product(ATOMS, ATOMS)
        assert product.set.orbit_count == 2

    def test_pairs_times_atoms_has_three_orbits(self):
        product = orbits_of_product(PAIRS, ATOMS)
        assert product.set.orbit_count == 3

    def test_iterated_triple_product_has_five_orbits(self):
        # orbits of N^3 = set partitions of three positions
        square = orbits_of_product(ATOMS, ATOMS)
        cube = orbits_of_product(square.set, ATOMS)
        assert cube.set.orbit_count == 5

    def test_orbit_count_bound(self):
        for left, right in [(UNORDERED_PAIRS, ATOMS), (PAIRS, PAIRS), (N_SQUARED, ATOMS)]:
            product = orbits_of_product(left, right)
            bound = left.orbit_count * right.orbit_count * fN_pair(left.dimension, right.dimension)
            assert product.set.orbit_count <= bound

    def test_dimension_bound(self):
        for left, right in [(PAIRS, PAIRS), (UNORDERED_PAIRS, ATOMS)]:
            product = orbits_of_product(left, right)
            assert product.set.dimension <= left.dimension + right.dimension

    def test_provenance_anchors_locate_to_their_orbit(self):
        product = orbits_of_product(N_SQUARED, ATOMS)
        for index, info in enumerate(product.orbit_infos):
            located = product.locate(*info.anchor)
            assert located.orbit == index

    def test_locate_split_round_trip(self):
        product = orbits_of_product(UNORDERED_PAIRS, ATOMS)
        rng = random.Random(3)
        for _ in range(50):
            x = UNORDERED_PAIRS.element(0, tuple(rng.sample(range(6), 2)))
            y = ATOMS.element(0, (rng.randrange(6),))
            assert product.split(product.locate(x, y)) == (x, y)

    def test_locate_is_equivariant(self):
        product = orbits_of_product(PAIRS, ATOMS)
        rng = random.Random(5)
        for _ in range(50):
            x = PAIRS.element(0, tuple(rng.sample(range(5), 2)))
            y = ATOMS.element(0, (rng.randrange(5),))
            images = list(range(6))
            rng.shuffle(images)
            pi = AtomPermutation.from_mapping(dict(zip(range(6), images)))
            direct = product.locate(PAIRS.act(pi, x), ATOMS.act(pi, y))
            assert direct == product.set.act(pi, product.locate(x, y))

    def test_same_orbit_iff_same_joint_key(self):
        sets = (UNORDERED_PAIRS, ATOMS)
        a = (UNORDERED_PAIRS.element(0, (3, 5)), ATOMS.element(0, (3,)))
        b = (UNORDERED_PAIRS.element(0, (3, 5)), ATOMS.element(0, (5,)))
        c = (UNORDERED_PAIRS.element(0, (3, 5)), ATOMS.element(0, (9,)))
        assert joint_orbit_key(sets, a) == joint_orbit_key(sets, b)
        assert joint_orbit_key(sets, a) != joint_orbit_key(sets, c)


class TestEquivariantMaps:
    def test_identity_map_on_atoms(self):
        maps = equivariant_maps_between(SupportRepresentation.tuples(1),
                                        SupportRepresentation.tuples(1))
        assert len(maps) == 1

    def test_no_maps_from_unordered_to_single(self):
        maps = equivariant_maps_between(
            SupportRepresentation(2, Subgroup.symmetric(2)), SupportRepresentation.tuples(1))
        assert maps == []

    def test_two_projections_from_ordered_pairs(self):
        maps = equivariant_maps_between(SupportRepresentation.tuples(2),
                                        SupportRepresentation.tuples(1))
        assert len(maps) == 2
        x = maps[0].source.element(0, (4, 7))
        images = {m.apply(x).atoms for m in maps}
        assert images == {(4,), (7,)}

    def test_maps_commute_with_action(self):
        rng = random.Random(11)
        src = SupportRepresentation(3, Subgroup.generated_by(3, ["(1 2 3)"]))
        for m in equivariant_maps_between(src, SupportRepresentation.tuples(1)):
            for _ in range(25):
                atoms = tuple(rng.sample(range(7), 3))
                x = m.source.element(0, atoms)
                images = list(range(8))
                rng.shuffle(images)
                pi = AtomPermutation.from_mapping(dict(zip(range(8), images)))
                assert m.apply(m.source.act(pi, x)) == m.target.act(pi, m.apply(x))

    def test_image_support_shrinks(self):
        maps = equivariant_maps_between(SupportRepresentation.tuples(2),
                                        SupportRepresentation.tuples(1))
        for m in maps:
            x = m.source.element(0, (2, 9))
            assert m.target.least_support(m.apply(x)) <= m.source.least_support(x)

    def test_validate_rejects_bad_injection(self):
        src = NominalSet((SupportRepresentation(2, Subgroup.symmetric(2)),))
        dst = NominalSet((SupportRepresentation.tuples(1),))
        with pytest.raises(ValueError):
            EquivariantMap(src, dst, ((0, (0,)),)).validate()


class TestIsoAndCounting:
    def test_identical_reps_iso(self):
        rep = SupportRepresentation(2, Subgroup.symmetric(2))
        assert iso_single_orbit(rep, rep)

    def test_conjugate_symmetries_iso(self):
        a = SupportRepresentation(3, Subgroup.generated_by(3, ["(1 2)"]))
        b = SupportRepresentation(3, Subgroup.generated_by(3, ["(2 3)"]))
        assert iso_single_orbit(a, b)

    def test_arity_differs(self):
        assert not iso_single_orbit(SupportRepresentation.tuples(2),
                                    SupportRepresentation.tuples(1))

    @pytest.mark.parametrize("k,count", [(1, 1), (2, 2), (3, 4), (4, 11)])
    def test_single_orbit_counts(self, k, count):
        assert count_single_orbit_sets(k) == count


class TestQuotient:
    def test_quotient_by_equality_is_isomorphic(self):
        result = quotient(N_SQUARED, lambda a, b: a == b)
        assert result.set.orbit_count == N_SQUARED.orbit_count
        for mine, original in zip(result.set.orbits, N_SQUARED.orbits):
            assert iso_single_orbit(mine, original)
        x = N_SQUARED.element(1, (2, 6))
        assert result.lift(result.projection.apply(x)) == x

    def test_same_orbit_relation_collapses_to_points(self):
        result = quotient(N_SQUARED, lambda a, b: a.orbit == b.orbit)
        assert result.set.orbit_count == 2
        assert all(rep.arity == 0 for rep in result.set.orbits)

    def test_ordered_mod_swap_gives_unordered(self):
        def unordered_equal(a, b):
            return frozenset(a.atoms) == frozenset(b.atoms)

        result = quotient(PAIRS, unordered_equal)
        assert result.set.orbit_count == 1
        assert iso_single_orbit(result.set.orbits[0], UNORDERED_PAIRS.orbits[0])

    def test_projection_is_equivariant_and_shrinks_support(self):
        result = quotient(N_SQUARED, lambda a, b: a.orbit == b.orbit)
        rng = random.Random(2)
        for _ in range(40):
            orbit = rng.randrange(2)
            atoms = tuple(rng.sample(range(6), N_SQUARED.orbits[orbit].arity))
            x = N_SQUARED.element(orbit, atoms)
            images = list(range(7))
            rng.shuffle(images)
            pi = AtomPermutation.from_mapping(dict(zip(range(7), images)))
            proj = result.projection
            assert proj.apply(N_SQUARED.act(pi, x)) == result.set.act(pi, proj.apply(x))
            assert result.set.least_support(proj.apply(x)) <= N_SQUARED.least_support(x)

    def test_invalid_relation_rejected(self):
        with pytest.raises(InvalidRelationError):
            quotient(ATOMS, lambda a, b: a.atoms <= b.atoms)  # not symmetric
        with pytest.raises(InvalidRelationError):
            quotient(ATOMS, lambda a, b: a.atoms[0] == 0 and b.atoms[0] == 0)  # not reflexive
        with pytest.raises(InvalidRelationError):
            # equates atom 0 with atom 1 only: not equivariant
            quotient(ATOMS, lambda a, b: a == b or {a.atoms[0], b.atoms[0]} == {0, 1})


class TestSerialization:
    def test_set_round_trip(self):
        for space in [ATOMS, PAIRS, UNORDERED_PAIRS, N_SQUARED]:
            assert set_from_record(set_to_record(space)) == space

    def test_element_round_trip(self):
        x = UNORDERED_PAIRS.element(0, (9, 4))
        record = element_to_record(x)
        assert record == {"orbit_index": 0, "atoms": [4, 9]}
        assert element_from_record(UNORDERED_PAIRS, record) == x

import itertools
import json

import pytest

from nomadfa.advice_dfa import (
    LanguageTable,
    enumerate_class,
    languages_within_states,
    mn_partition,
    zero_count_override_language,
)
from nomadfa.concepts import handle_from_tables
from nomadfa.dimensions import cdim_exact, minimal_inconsistent_size
from nomadfa.fixtures import (
    aa_language,
    atoms_alphabet,
    empty_language,
    first_equals_last,
    full_language,
    repeated_pair_language,
)
from nomadfa.nominal_dfa import minimize, word_from_key
from nomadfa.witnesses import (
    NotAWitnessCaseError,
    WitnessSet,
    advice_witness,
    nominal_dimension_witness,
    nominal_orbit_witness,
    non_equivariance_witness,
    replay_points,
    validate_witness,
)

ALPHABET = atoms_alphabet()


def single_zero_table():
    return LanguageTable.from_dict(("0", "1"), 2, {
        "": 0, "0": 1, "1": 0, "00": 0, "01": 0, "10": 0, "11": 0})


def machine_predicate(machine):
    return lambda key: machine.accepts_word(word_from_key(ALPHABET, key))


class TestAdviceWitness:
    def test_single_zero_language(self):
        witness = advice_witness(single_zero_table(), 1)
        assert witness.points == ("0", "1")
        assert witness.labels == (1, 0)
        assert witness.claimed_bound == 2

    def test_reference_language(self):
        witness = advice_witness(zero_count_override_language(2, 4), 1)
        assert len(witness.points) <= 2

    def test_no_case_when_classes_small(self):
        constant = LanguageTable.from_predicate(("0", "1"), 2, lambda w: True)
        with pytest.raises(NotAWitnessCaseError):
            advice_witness(constant, 1)

    def test_forced_classes_after_any_extension(self):
        # soundness at desk scale: every total extension of the restriction
        # keeps more than n classes at the witnessed level
        table = single_zero_table()
        witness = advice_witness(table, 1)
        level = witness.provenance["level"]
        pinned = witness.labeled_points()
        free = [w for w in table.domain() if w not in pinned]
        for bits in itertools.product((0, 1), repeat=len(free)):
            values = dict(pinned)
            values.update(zip(free, bits))
            extension = LanguageTable.from_dict(("0", "1"), 2, values)
            assert mn_partition(extension, level).class_count > 1

    def test_full_extension_validation_via_enumerated_class(self):
        table = single_zero_table()
        witness = advice_witness(table, 1)
        klass = handle_from_tables(enumerate_class(2, 1, 2))
        report = validate_witness(
            witness, table.value,
            [(f"member{i}", m.value) for i, m in enumerate(klass.members)],
            extension_class=klass)
        assert report.ok
        assert report.extensions_checked == 2 ** 5

    def test_replay(self):
        witness = advice_witness(single_zero_table(), 1)
        assert replay_points(witness) == witness.points

    def test_witness_bounds_never_undercut_cdim(self):
        klass = handle_from_tables(enumerate_class(2, 1, 2))
        hypotheses = handle_from_tables(languages_within_states(2, 2, 2))
        worst_witness = 0
        for code in range(2 ** 7):
            bits = tuple((code >> i) & 1 for i in range(7))
            table = LanguageTable(("0", "1"), 2, bits)
            from nomadfa.concepts import concept_from_table
            concept = concept_from_table(klass.domain, table)
            if concept in hypotheses:
                continue
            witness = advice_witness(table, 1)
            worst_witness = max(worst_witness, len(witness.points))
            size, _ = minimal_inconsistent_size(concept, klass)
            assert size <= len(witness.points)
        assert cdim_exact(klass, hypotheses) <= worst_witness


class TestNominalDimensionWitness:
    def test_repeated_pair_language(self):
        machine = minimize(repeated_pair_language()).automaton
        witness = nominal_dimension_witness(machine, 1)
        # two swaps, two points each; the base-plus-suffix point is shared
        # because both swaps use the same distinguishing suffix
        assert witness.claimed_bound == 4
        assert 3 <= len(witness.points) <= 4
        assert len(witness.provenance["suffixes"]) == 2
        for point, label in witness.labeled_points().items():
            assert machine.accepts_word(word_from_key(ALPHABET, point)) == bool(label)

    def test_aa_has_no_high_dimension_state(self):
        machine = minimize(aa_language()).automaton
        with pytest.raises(NotAWitnessCaseError):
            nominal_dimension_witness(machine, 1)

    def test_replay(self):
        machine = minimize(repeated_pair_language()).automaton
        witness = nominal_dimension_witness(machine, 1)
        assert replay_points(witness, ALPHABET) == witness.points

    def test_swapped_and_base_words_disagree_after_suffix(self):
        machine = minimize(repeated_pair_language()).automaton
        witness = nominal_dimension_witness(machine, 1)
        prov = witness.provenance
        base = word_from_key(ALPHABET, prov["base_word"])
        from nomadfa.nominal import AtomPermutation
        from nomadfa.nominal_dfa import word_act
        for atom_text, suffix_key in prov["suffixes"].items():
            tau = AtomPermutation.transposition(int(atom_text), int(atom_text) + prov["shift"])
            suffix = word_from_key(ALPHABET, suffix_key)
            moved = word_act(ALPHABET, tau, base)
            assert machine.accepts_word(moved.concat(suffix)) != \
                machine.accepts_word(base.concat(suffix))


class TestNominalOrbitWitness:
    def test_aa_language_bound(self):
        machine = minimize(aa_language()).automaton
        witness = nominal_orbit_witness(machine, 3, 1)
        assert witness.claimed_bound == 324  # 2 * C(4,2) * C(3,1) * 9
        assert len(witness.points) <= 324
        assert len(witness.provenance["representatives"]) == 4
        for pair in witness.provenance["pairs"]:
            assert len(pair["sigmas"]) <= 27  # C(3,1) * (3*1*3)^1

    def test_single_orbit_language_has_no_case(self):
        machine = minimize(empty_language()).automaton
        with pytest.raises(NotAWitnessCaseError):
            nominal_orbit_witness(machine, 1, 1)

    def test_fixture_relative_validation(self):
        machine = minimize(aa_language()).automaton
        witness = nominal_orbit_witness(machine, 3, 1)
        # fixtures inside the witnessed class: at most 3 orbits, dimension 1
        fixtures = [
            ("empty", machine_predicate(empty_language())),
            ("full", machine_predicate(full_language())),
            ("first_last", machine_predicate(first_equals_last())),
        ]
        report = validate_witness(witness, machine_predicate(machine), fixtures)
        assert report.ok

    def test_validation_flags_the_language_itself(self):
        machine = minimize(aa_language()).automaton
        witness = nominal_orbit_witness(machine, 3, 1)
        report = validate_witness(witness, machine_predicate(machine),
                                  [("aa", machine_predicate(machine))])
        assert not report.ok and report.fixture_failures == ("aa",)

    def test_replay(self):
        machine = minimize(aa_language()).automaton
        witness = nominal_orbit_witness(machine, 3, 1)
        assert replay_points(witness, ALPHABET) == witness.points

    def test_representatives_are_short(self):
        machine = minimize(aa_language()).automaton
        witness = nominal_orbit_witness(machine, 3, 1)
        for key in witness.provenance["representatives"]:
            assert len(word_from_key(ALPHABET, key).letters) <= 3

    def test_parameter_regime_guard(self):
        machine = minimize(aa_language()).automaton
        with pytest.raises(NotAWitnessCaseError):
            nominal_orbit_witness(machine, 3, 4)


class TestNonEquivariance:
    def test_same_orbit_different_labels(self):
        witness = non_equivariance_witness(ALPHABET, {"0 1": 1, "2 3": 0})
        assert witness.points == ("0 1", "2 3")
        assert witness.claimed_bound == 2

    def test_equivariant_table_rejected(self):
        with pytest.raises(NotAWitnessCaseError):
            non_equivariance_witness(ALPHABET, {"0 1": 1, "2 3": 1, "0 0": 0})

    def test_replay(self):
        witness = non_equivariance_witness(ALPHABET, {"5 6": 0, "1 2": 1})
        assert replay_points(witness, ALPHABET) == witness.points


class TestValidationEdges:
    def test_empty_witness_fails(self):
        empty = WitnessSet("advice-classes", (), (), 2, {})
        report = validate_witness(empty, lambda k: 0, [])
        assert not report.ok

    def test_label_replay_mismatch_detected(self):
        witness = WitnessSet("advice-classes", ("0",), (1,), 2, {})
        report = validate_witness(witness, lambda k: 0, [])
        assert not report.ok

    def test_record_round_trip(self):
        witness = advice_witness(single_zero_table(), 1)
        loaded = WitnessSet.from_record(json.loads(json.dumps(witness.to_record())))
        assert loaded == witness

    def test_size_invariant_enforced(self):
        with pytest.raises(ValueError):
            WitnessSet("advice-classes", ("a", "b", "c"), (0, 0, 0), 2, {})

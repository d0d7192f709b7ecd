import random

import pytest

from nomadfa.advice_dfa import (
    languages_within_states,
    AdviceDFA,
    BudgetExceededError,
    LanguageTable,
    accepts,
    advice_from_record,
    advice_to_record,
    distinguishing_suffix,
    domain_strings,
    enumerate_class,
    language_table,
    layered_feasible,
    max_class_count,
    minimal_states,
    mn_partition,
    realize_minimal,
    synthesize,
    table_from_record,
    table_to_record,
    zero_count_override_language,
)

REFERENCE = zero_count_override_language(2, 4)


def one_state_machine(m, accepting):
    return AdviceDFA(("0", "1"), m, 1, tuple(((0, 0),) for _ in range(m)),
                     0, frozenset({0} if accepting else set()))


def random_table_with_few_classes(rng, horizon, max_classes):
    sigma = ("0", "1")
    size = len(domain_strings(sigma, horizon))
    while True:
        table = LanguageTable(sigma, horizon, tuple(rng.randrange(2) for _ in range(size)))
        if max_class_count(table) <= max_classes:
            return table


class TestDomain:
    def test_order_is_length_then_lex(self):
        assert domain_strings(("0", "1"), 2) == ["", "0", "1", "00", "01", "10", "11"]

    def test_size(self):
        assert len(domain_strings(("0", "1"), 4)) == 31


class TestAccepts:
    def test_reference_language_values(self):
        machine = realize_minimal(REFERENCE)
        assert accepts(machine, "000")
        assert not accepts(machine, "00")
        assert accepts(machine, "")

    def test_word_too_long(self):
        with pytest.raises(ValueError):
            accepts(one_state_machine(2, True), "000")

    def test_foreign_symbol(self):
        with pytest.raises(ValueError):
            accepts(one_state_machine(2, True), "2")


class TestLanguageTable:
    def test_one_state_all_accepting(self):
        table = language_table(one_state_machine(1, True))
        assert table.as_dict() == {"": 1, "0": 1, "1": 1}

    def test_one_state_rejecting(self):
        table = language_table(one_state_machine(1, False))
        assert set(table.bits) == {0}

    def test_reference_language_table(self):
        # evaluate the defining formula directly on all 31 strings
        machine = realize_minimal(REFERENCE)
        table = language_table(machine)
        assert len(table.bits) == 31
        for word in table.domain():
            expected = int(len(word) == 3 or (word.count("0") % 2 == 0 and len(word) != 2))
            assert table.value(word) == expected

    def test_round_trip_record(self):
        assert table_from_record(table_to_record(REFERENCE)) == REFERENCE


class TestMNPartition:
    def test_reference_language_length_two(self):
        partition = mn_partition(REFERENCE, 2)
        assert partition.blocks == (("00", "11"), ("01", "10"))

    def test_reference_language_all_lengths_at_most_two(self):
        for ell in range(5):
            assert mn_partition(REFERENCE, ell).class_count <= 2

    def test_empty_language_single_block(self):
        empty = LanguageTable.from_predicate(("0", "1"), 3, lambda w: False)
        for ell in range(4):
            assert mn_partition(empty, ell).class_count == 1

    def test_epsilon_extension_separates(self):
        table = LanguageTable.from_dict(("0", "1"), 2, {
            "": 0, "0": 1, "1": 0, "00": 0, "01": 0, "10": 0, "11": 0})
        assert mn_partition(table, 1).class_count == 2

    def test_distinguishing_suffix_is_shortest_lex(self):
        z = distinguishing_suffix(REFERENCE, "00", "01")
        assert z == "00"  # all length-3 strings are accepted, so epsilon/1-suffixes tie
        assert REFERENCE.value("00" + z) != REFERENCE.value("01" + z)


class TestSynthesize:
    def test_empty_language(self):
        empty = LanguageTable.from_predicate(("0", "1"), 2, lambda w: False)
        machine = synthesize(empty)
        assert machine.state_count <= 2
        assert language_table(machine) == empty

    def test_reference_language_round_trip(self):
        machine = synthesize(REFERENCE)
        assert machine.state_count <= 4
        assert language_table(machine) == REFERENCE

    def test_random_tables_round_trip(self):
        rng = random.Random(20)
        for _ in range(50):
            table = random_table_with_few_classes(rng, 3, 3)
            machine = synthesize(table)
            assert machine.state_count <= 2 * max_class_count(table)
            assert language_table(machine) == table

    def test_record_round_trip(self):
        machine = synthesize(REFERENCE)
        assert advice_from_record(advice_to_record(machine)) == machine


class TestMinimalStates:
    def test_reference_language_needs_four(self):
        assert minimal_states(REFERENCE) == 4

    def test_divisor_three_variant_needs_six(self):
        assert minimal_states(zero_count_override_language(3, 4)) == 6

    def test_empty_language(self):
        empty = LanguageTable.from_predicate(("0", "1"), 2, lambda w: False)
        assert minimal_states(empty) == 1

    def test_realize_minimal_round_trip(self):
        for table in [REFERENCE, zero_count_override_language(3, 4)]:
            machine = realize_minimal(table)
            assert machine.state_count == minimal_states(table)
            assert language_table(machine) == table

    def test_sandwich(self):
        rng = random.Random(4)
        for _ in range(20):
            table = random_table_with_few_classes(rng, 3, 4)
            n = max_class_count(table)
            assert n <= minimal_states(table) <= 2 * n


class TestLayeredFeasibility:
    def test_reference_language_infeasible_on_three_states(self):
        assert not layered_feasible(REFERENCE, 3)
        assert layered_feasible(REFERENCE, 4)

    def test_oracle_matches_minimal_states(self):
        rng = random.Random(9)
        for _ in range(12):
            table = random_table_with_few_classes(rng, 2, 4)
            minimum = minimal_states(table)
            assert layered_feasible(table, minimum)
            if minimum > 1:
                assert not layered_feasible(table, minimum - 1)


class TestEnumerateClass:
    def test_single_state_languages(self):
        tables = enumerate_class(2, 1, 2)
        assert len(tables) == 2
        assert {tuple(t.bits) for t in tables} == {(0,) * 7, (1,) * 7}

    def test_two_states_one_step_gives_all_subsets(self):
        tables = enumerate_class(2, 2, 1)
        assert len(tables) == 8

    def test_count_within_machine_budget(self):
        for (k, n, m) in [(2, 1, 2), (2, 2, 1), (2, 2, 2)]:
            tables = enumerate_class(k, n, m)
            assert len(tables) <= n ** (n * m * k) * 2 ** n
            assert len({t.bits for t in tables}) == len(tables)

    def test_budget_guard(self):
        with pytest.raises(BudgetExceededError):
            enumerate_class(3, 4, 4)

    def test_class_count_bound_for_every_enumerated_language(self):
        # n-state machines cannot have more than n classes at any length
        for (k, n, m) in [(2, 1, 2), (2, 2, 1), (2, 2, 2)]:
            for table in enumerate_class(k, n, m):
                assert max_class_count(table) <= n

    def test_enumerated_languages_are_realizable_within_two_n(self):
        for table in enumerate_class(2, 2, 2):
            assert minimal_states(table) <= 4

    def test_state_filter_agrees_with_machine_enumeration(self):
        for (k, n, m) in [(2, 1, 1), (2, 1, 2), (2, 2, 1), (2, 2, 2)]:
            by_machines = {t.bits for t in enumerate_class(k, n, m)}
            by_filter = {t.bits for t in languages_within_states(k, n, m)}
            assert by_machines == by_filter

"""Advice DFAs over a finite alphabet, truncated to strings of length <= m.

The advice alphabet is never materialized: an advice letter is exactly a
transition table for its step, so a machine carries one table per step.
Languages live on the finite domain of strings of length <= m and are stored
as explicit truth tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache


class BudgetExceededError(ValueError):
    """Raised when an enumeration or tabulation would exceed its stated budget."""


LANGUAGE_TABLE_BUDGET = 10 ** 6
ENUMERATION_BUDGET = 10 ** 7


def domain_strings(sigma: tuple[str, ...], horizon: int) -> list[str]:
    """All strings of length <= horizon, shortest first, lexicographic within
    a length (in alphabet order)."""
    out = []
    for length in range(horizon + 1):
        out.extend("".join(chars) for chars in itertools.product(sigma, repeat=length))
    return out


@dataclass(frozen=True)
class AdviceDFA:
    """A DFA whose transition table may differ at every step.

    step_tables[i][q][s] is the successor of state q on the (i+1)-th input
    symbol with symbol index s.
    """

    sigma: tuple[str, ...]
    horizon: int
    state_count: int
    step_tables: tuple[tuple[tuple[int, ...], ...], ...]
    initial: int
    accepting: frozenset[int]

    def __post_init__(self):
        if len(self.step_tables) != self.horizon:
            raise ValueError(f"expected {self.horizon} step tables, got {len(self.step_tables)}")
        for table in self.step_tables:
            if len(table) != self.state_count or any(len(row) != len(self.sigma) for row in table):
                raise ValueError("each step table must be state_count x |sigma|")
            if any(not 0 <= q < self.state_count for row in table for q in row):
                raise ValueError("transition target out of range")
        if not 0 <= self.initial < self.state_count:
            raise ValueError("initial state out of range")
        if not self.accepting <= set(range(self.state_count)):
            raise ValueError("accepting states out of range")

    def symbol_index(self, symbol: str) -> int:
        try:
            return self.sigma.index(symbol)
        except ValueError:
            raise ValueError(f"symbol {symbol!r} not in alphabet {self.sigma}") from None


def accepts(machine: AdviceDFA, word: str) -> bool:
    if len(word) > machine.horizon:
        raise ValueError(f"word longer than horizon {machine.horizon}: {word!r}")
    state = machine.initial
    for step, symbol in enumerate(word):
        state = machine.step_tables[step][state][machine.symbol_index(symbol)]
    return state in machine.accepting


@dataclass(frozen=True)
class LanguageTable:
    """The truth table of a language on all strings of length <= horizon,
    in domain order (shortest first, then lexicographic)."""

    sigma: tuple[str, ...]
    horizon: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != len(domain_strings(self.sigma, self.horizon)):
            raise ValueError("bit vector does not cover the domain")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0/1")

    def domain(self) -> list[str]:
        return domain_strings(self.sigma, self.horizon)

    def value(self, word: str) -> int:
        return self.bits[_domain_index(self.sigma, self.horizon)[word]]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.domain(), self.bits))

    @classmethod
    def from_dict(cls, sigma, horizon: int, mapping: dict[str, int]) -> "LanguageTable":
        sigma = tuple(sigma)
        return cls(sigma, horizon,
                   tuple(int(mapping[w]) for w in domain_strings(sigma, horizon)))

    @classmethod
    def from_predicate(cls, sigma, horizon: int, predicate) -> "LanguageTable":
        sigma = tuple(sigma)
        return cls(sigma, horizon,
                   tuple(int(bool(predicate(w))) for w in domain_strings(sigma, horizon)))


@lru_cache(maxsize=None)
def _domain_index(sigma: tuple[str, ...], horizon: int) -> dict[str, int]:
    return {w: i for i, w in enumerate(domain_strings(sigma, horizon))}


def language_table(machine: AdviceDFA) -> LanguageTable:
    if len(machine.sigma) ** machine.horizon > LANGUAGE_TABLE_BUDGET:
        raise BudgetExceededError("domain too large to tabulate")
    return LanguageTable.from_predicate(machine.sigma, machine.horizon,
                                        lambda w: accepts(machine, w))


@dataclass(frozen=True)
class MNPartition:
    """The classes of strings of one length under future-equivalence."""

    length: int
    blocks: tuple[tuple[str, ...], ...]

    @property
    def class_count(self) -> int:
        return len(self.blocks)


def mn_partition(table: LanguageTable, length: int) -> MNPartition:
    """Group the strings of the given length by their extension profiles
    (values on every suffix of length <= horizon - length, including the
    empty suffix)."""
    if length > table.horizon:
        raise ValueError(f"length {length} exceeds horizon {table.horizon}")
    suffixes = domain_strings(table.sigma, table.horizon - length)
    groups: dict[tuple[int, ...], list[str]] = {}
    for chars in itertools.product(table.sigma, repeat=length):
        word = "".join(chars)
        profile = tuple(table.value(word + z) for z in suffixes)
        groups.setdefault(profile, []).append(word)
    blocks = sorted((tuple(sorted(g)) for g in groups.values()), key=lambda b: b[0])
    return MNPartition(length, tuple(blocks))


def distinguishing_suffix(table: LanguageTable, x: str, y: str) -> str | None:
    """Shortest (then lexicographically least) z with L(xz) != L(yz)."""
    if len(x) != len(y):
        raise ValueError("strings must have equal length")
    for z in domain_strings(table.sigma, table.horizon - len(x)):
        if table.value(x + z) != table.value(y + z):
            return z
    return None


def max_class_count(table: LanguageTable) -> int:
    return max(mn_partition(table, ell).class_count for ell in range(table.horizon + 1))


def _level_partitions(table: LanguageTable) -> list[MNPartition]:
    return [mn_partition(table, ell) for ell in range(table.horizon + 1)]


def _build_layered(table: LanguageTable, state_of_block, state_count: int,
                   accepting: frozenset[int]) -> AdviceDFA:
    """Assemble an advice DFA from per-level block-to-state assignments.

    state_of_block(level, block_index) gives the machine state carrying that
    class; transitions out of states that carry no class at a level are wired
    to the state of block 0 of the next level.
    """
    partitions = _level_partitions(table)
    index_of = [
        {w: b for b, block in enumerate(p.blocks) for w in block}
        for p in partitions
    ]
    tables = []
    for level in range(1, table.horizon + 1):
        prev, cur = partitions[level - 1], partitions[level]
        row_default = state_of_block(level, 0)
        rows = [[row_default] * len(table.sigma) for _ in range(state_count)]
        for b, block in enumerate(prev.blocks):
            rep = block[0]
            src = state_of_block(level - 1, b)
            for s, symbol in enumerate(table.sigma):
                target_block = index_of[level][rep + symbol]
                rows[src][s] = state_of_block(level, target_block)
        tables.append(tuple(tuple(row) for row in rows))
    initial = state_of_block(0, 0)
    return AdviceDFA(table.sigma, table.horizon, state_count, tuple(tables),
                     initial, accepting)


def synthesize(table: LanguageTable) -> AdviceDFA:
    """An advice DFA recognizing the table exactly, on at most 2n states for
    n the largest per-length class count.

    States are pairs (class id at the current length, acceptance bit); ids
    are reused across lengths, the accepting set stays fixed over time.
    """
    n = max_class_count(table)
    partitions = _level_partitions(table)
    bits = [[table.value(block[0]) for block in p.blocks] for p in partitions]

    def state_of_block(level: int, block: int) -> int:
        return 2 * block + bits[level][block]

    machine = _build_layered(table, state_of_block, 2 * n,
                             frozenset(2 * b + 1 for b in range(n)))
    return machine


def minimal_states(table: LanguageTable) -> int:
    """Exact minimum state count of an advice DFA recognizing the table.

    Lower bound: at any one length, inequivalent strings end in distinct
    states and the accepting set does not vary over time, so accepting and
    rejecting classes need disjoint state pools sized by their worst lengths.
    Upper bound: realize_minimal builds a machine of exactly that size.
    """
    partitions = _level_partitions(table)
    max_acc = max(sum(table.value(b[0]) for b in p.blocks) for p in partitions)
    max_rej = max(sum(1 - table.value(b[0]) for b in p.blocks) for p in partitions)
    return max_acc + max_rej


def realize_minimal(table: LanguageTable) -> AdviceDFA:
    """A recognizer on exactly minimal_states(table) states."""
    partitions = _level_partitions(table)
    max_acc = max(sum(table.value(b[0]) for b in p.blocks) for p in partitions)
    assignments = []
    for p in partitions:
        acc_seen = rej_seen = 0
        level = []
        for block in p.blocks:
            if table.value(block[0]):
                level.append(acc_seen)
                acc_seen += 1
            else:
                level.append(max_acc + rej_seen)
                rej_seen += 1
        assignments.append(level)

    def state_of_block(level: int, block: int) -> int:
        return assignments[level][block]

    return _build_layered(table, state_of_block, minimal_states(table),
                          frozenset(range(max_acc)))


def enumerate_class(k: int, n: int, m: int) -> list[LanguageTable]:
    """Every language recognized by an advice DFA with at most n states on
    strings of length <= m over a k-symbol alphabet, deduplicated and in
    bit-vector order.

    Machines are normalized to state set [n] with initial state 0; any
    machine with at most n states is equivalent to one of these up to
    renaming states per step.
    """
    budget = (n ** (n * m * k)) * (2 ** n)
    if budget > ENUMERATION_BUDGET:
        raise BudgetExceededError(f"machine space {budget} exceeds {ENUMERATION_BUDGET}")
    sigma = tuple(str(d) for d in range(k))
    words = domain_strings(sigma, m)
    step_choices = [
        tuple(tuple(row) for row in rows)
        for rows in itertools.product(itertools.product(range(n), repeat=k), repeat=n)
    ]
    seen: set[tuple[int, ...]] = set()
    for steps in itertools.product(step_choices, repeat=m):
        # end states per word, shared across accepting-set choices
        finals = []
        for word in words:
            state = 0
            for step, symbol in enumerate(word):
                state = steps[step][state][int(symbol)]
            finals.append(state)
        for accepting in range(2 ** n):
            bits = tuple((accepting >> q) & 1 for q in finals)
            seen.add(bits)
    return [LanguageTable(sigma, m, bits) for bits in sorted(seen)]


def languages_within_states(k: int, n: int, m: int) -> list[LanguageTable]:
    """Every language on strings of length <= m recognizable with at most n
    states, by filtering all truth tables through the exact minimum-state
    count.  Agrees with enumerate_class wherever both are affordable, but
    scales with the domain rather than the machine space."""
    sigma = tuple(str(d) for d in range(k))
    size = len(domain_strings(sigma, m))
    if 2 ** size > ENUMERATION_BUDGET:
        raise BudgetExceededError(f"2^{size} truth tables exceed {ENUMERATION_BUDGET}")
    out = []
    for code in range(2 ** size):
        bits = tuple((code >> i) & 1 for i in range(size))
        table = LanguageTable(sigma, m, bits)
        if minimal_states(table) <= n:
            out.append(table)
    return out


def layered_feasible(table: LanguageTable, n: int) -> bool:
    """Whether any advice DFA on n states recognizes the table, by exhaustive
    search over layered state assignments.

    Any recognizer yields, per length, an injective assignment of that
    length's classes to states (inequivalent strings must end in distinct
    states) whose accepting-set membership matches the class bit, with the
    accepting set shared across lengths; conversely any such family of
    assignments lifts to step tables.  The search constructs the step tables
    explicitly rather than trusting that argument.
    """
    partitions = _level_partitions(table)
    level_blocks = [[(b, table.value(block[0])) for b, block in enumerate(p.blocks)]
                    for p in partitions]
    index_of = [
        {w: b for b, block in enumerate(p.blocks) for w in block}
        for p in partitions
    ]

    def assignments(level, accepting):
        blocks = level_blocks[level]
        for states in itertools.permutations(range(n), len(blocks)):
            if all((states[i] in accepting) == bool(bit) for i, (_, bit) in enumerate(blocks)):
                yield dict(zip((b for b, _ in blocks), states))

    def extend(level, prev_assignment, accepting):
        if level > table.horizon:
            return True
        for assignment in assignments(level, accepting):
            delta: dict[tuple[int, str], int] = {}
            ok = True
            for b, block in enumerate(partitions[level - 1].blocks):
                rep = block[0]
                for symbol in table.sigma:
                    key = (prev_assignment[b], symbol)
                    target = assignment[index_of[level][rep + symbol]]
                    if delta.setdefault(key, target) != target:
                        ok = False
                        break
                if not ok:
                    break
            if ok and extend(level + 1, assignment, accepting):
                return True
        return False

    for acc_mask in range(2 ** n):
        accepting = {q for q in range(n) if (acc_mask >> q) & 1}
        for first in assignments(0, accepting):
            if extend(1, first, accepting):
                return True
    return False


def zero_count_override_language(divisor: int, horizon: int) -> LanguageTable:
    """Accept when the number of '0's is divisible by `divisor`, except that
    length-2 strings are always rejected and length-3 strings always accepted."""

    def member(word: str) -> bool:
        if len(word) == 3:
            return True
        if len(word) == 2:
            return False
        return word.count("0") % divisor == 0

    return LanguageTable.from_predicate(("0", "1"), horizon, member)


def advice_to_record(machine: AdviceDFA) -> dict:
    return {
        "sigma": list(machine.sigma),
        "m": machine.horizon,
        "n": machine.state_count,
        "q0": machine.initial,
        "accepting": sorted(machine.accepting),
        "steps": [[list(row) for row in table] for table in machine.step_tables],
    }


def advice_from_record(record: dict) -> AdviceDFA:
    return AdviceDFA(
        sigma=tuple(record["sigma"]),
        horizon=int(record["m"]),
        state_count=int(record["n"]),
        step_tables=tuple(tuple(tuple(int(q) for q in row) for row in table)
                          for table in record["steps"]),
        initial=int(record["q0"]),
        accepting=frozenset(int(q) for q in record["accepting"]),
    )


def table_to_record(table: LanguageTable) -> dict:
    return {"sigma": list(table.sigma), "m": table.horizon, "bits": table.as_dict()}


def table_from_record(record: dict) -> LanguageTable:
    return LanguageTable.from_dict(tuple(record["sigma"]), int(record["m"]), record["bits"])

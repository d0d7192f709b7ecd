"""Exact Littlestone and consistency dimensions for finite concept classes,
and bound reports comparing them against closed-form limits."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .advice_dfa import enumerate_class, languages_within_states
from .concepts import Concept, ConceptClassHandle, handle_from_tables, is_n_consistent
from .nominal import NominalSet, count_single_orbit_sets, equivariant_maps_between, orbits_of_product

LDIM_CLASS_BUDGET = 4096
CDIM_CONCEPT_BUDGET = 10 ** 6


class BudgetExceededError(ValueError):
    pass


@dataclass(frozen=True)
class ShatteredTree:
    """A complete binary element tree with concept-index leaves.

    Left children carry label 1 for the instance at their parent, right
    children label 0.
    """

    height: int
    key: str | None = None
    left: "ShatteredTree | None" = None
    right: "ShatteredTree | None" = None
    leaf: int | None = None

    @classmethod
    def leaf_node(cls, index: int) -> "ShatteredTree":
        return cls(0, leaf=index)

    @classmethod
    def node(cls, key: str, left: "ShatteredTree", right: "ShatteredTree") -> "ShatteredTree":
        if left.height != right.height:
            raise ValueError("children of a complete tree have equal height")
        return cls(left.height + 1, key=key, left=left, right=right)


def validate_shattered(tree: ShatteredTree, klass: ConceptClassHandle) -> bool:
    """Independent path-realization check: every root-to-leaf path is realized
    by its leaf concept (left child = value 1)."""

    def walk(node: ShatteredTree, constraints: list[tuple[str, int]]) -> bool:
        if node.leaf is not None:
            concept = klass.members[node.leaf]
            return all(concept.value(key) == bit for key, bit in constraints)
        if node.key is None or node.left is None or node.right is None:
            return False
        if node.left.height != node.height - 1 or node.right.height != node.height - 1:
            return False
        return (walk(node.left, constraints + [(node.key, 1)])
                and walk(node.right, constraints + [(node.key, 0)]))

    return walk(tree, [])


def _truncate(tree: ShatteredTree, height: int) -> ShatteredTree:
    if height == 0:
        node = tree
        while node.leaf is None:
            node = node.left
        return node
    return ShatteredTree.node(tree.key, _truncate(tree.left, height - 1),
                              _truncate(tree.right, height - 1))


def ldim_exact(klass: ConceptClassHandle) -> tuple[int, ShatteredTree]:
    """Exact Littlestone dimension with a shattered-tree witness.

    Recursion: a tree of height d+1 exists iff some instance splits the class
    into two parts both shattering height-d trees.  Repeating an instance
    along a path never helps (the repeated node's two subtrees constrain the
    same split), so scanning distinct instances per level is exact.
    """
    if len(klass) > LDIM_CLASS_BUDGET:
        raise BudgetExceededError(f"class size {len(klass)} exceeds {LDIM_CLASS_BUDGET}")
    keys = klass.domain.keys
    bit_rows = {i: m.bits for i, m in enumerate(klass.members)}
    memo: dict[frozenset, tuple[int, ShatteredTree]] = {}

    def rec(indices: frozenset) -> tuple[int, ShatteredTree]:
        if indices in memo:
            return memo[indices]
        best = (0, ShatteredTree.leaf_node(min(indices)))
        if len(indices) > 1:
            for position, key in enumerate(keys):
                ones = frozenset(i for i in indices if bit_rows[i][position] == 1)
                zeros = indices - ones
                if not ones or not zeros:
                    continue
                d1, t1 = rec(ones)
                d0, t0 = rec(zeros)
                depth = 1 + min(d1, d0)
                if depth > best[0]:
                    best = (depth, ShatteredTree.node(
                        key, _truncate(t1, depth - 1), _truncate(t0, depth - 1)))
        memo[indices] = best
        return best

    return rec(frozenset(range(len(klass))))


def ldim_log_bound(klass: ConceptClassHandle) -> int:
    """floor(log2 |class|): a taller tree has two leaves sharing a concept."""
    return len(klass).bit_length() - 1


def minimal_inconsistent_size(concept: Concept, klass: ConceptClassHandle):
    """Smallest restriction size of the concept with no extension in the
    class, or None when the concept itself belongs to the class closure."""
    for n in range(1, len(concept.domain) + 1):
        ok, witness = is_n_consistent(concept, klass, n)
        if not ok:
            return n, witness
    return None


def cdim_exact(klass: ConceptClassHandle, hypotheses: ConceptClassHandle) -> int:
    """Least n such that every total concept n-consistent with the class lies
    in the hypothesis class; quantifies over all total concepts."""
    if klass.domain != hypotheses.domain:
        raise ValueError("classes must share a domain")
    size = len(klass.domain)
    if 2 ** size > CDIM_CONCEPT_BUDGET:
        raise BudgetExceededError(f"2^{size} concepts exceed {CDIM_CONCEPT_BUDGET}")
    worst = 0
    for code in range(2 ** size):
        bits = tuple((code >> i) & 1 for i in range(size))
        concept = Concept(klass.domain, bits)
        if concept in hypotheses:
            continue
        found = minimal_inconsistent_size(concept, klass)
        if found is None:
            return math.inf  # an outside concept is consistent at every size
        worst = max(worst, found[0])
    return worst


@dataclass(frozen=True)
class BoundRow:
    setting: str
    params: str
    quantity: str
    exact: object
    paper_bound: object
    ok: bool | None

    def csv_values(self) -> list[str]:
        return [
            self.setting,
            self.params,
            self.quantity,
            str(self.exact),
            "" if self.paper_bound is None else str(self.paper_bound),
            "" if self.ok is None else str(self.ok).lower(),
        ]


@dataclass(frozen=True)
class BoundReport:
    rows: tuple[BoundRow, ...]

    CSV_HEADER = ["setting", "params", "quantity", "exact", "paper_bound", "pass"]

    def all_ok(self) -> bool:
        return all(row.ok for row in self.rows if row.ok is not None)


def advice_ldim_limit(n: int, m: int, k: int) -> float:
    """log2 of the machine-count bound n^(nmk) 2^n."""
    return n * m * k * math.log2(n) + n if n > 1 else float(n)


def nominal_cdim_limit(n: int, k: int, p: int) -> int:
    return 2 * math.comb(n + 1, 2) * math.comb(p * n, k) * (3 * p * n) ** k


def count_transition_functions(states: NominalSet, alphabet: NominalSet) -> int:
    """Exact number of equivariant transition functions states x alphabet ->
    states: independently for each product orbit, a target orbit and an
    equivariant map into it."""
    product = orbits_of_product(states, alphabet)
    total = 1
    for rep in product.set.orbits:
        choices = sum(len(equivariant_maps_between(rep, target))
                      for target in states.orbits)
        total *= choices
    return total


def count_state_sets(n: int, k: int) -> int:
    """Exact number of orbit-finite sets with n unordered orbits of dimension
    at most k: multisets of single-orbit isomorphism types."""
    types = 1 + sum(count_single_orbit_sets(arity) for arity in range(1, k + 1))
    return math.comb(types + n - 1, n)


def advice_bound_report(n: int, m: int, k: int) -> BoundReport:
    klass = handle_from_tables(enumerate_class(k, n, m), f"adv(k={k},n={n},m={m})")
    hypotheses = handle_from_tables(languages_within_states(k, 2 * n, m),
                                    f"adv(k={k},n={2 * n},m={m})")
    params = f"n={n},m={m},k={k}"
    cdim = cdim_exact(klass, hypotheses)
    cdim_limit = n * (n + 1)
    ldim, _ = ldim_exact(klass)
    ldim_limit = advice_ldim_limit(n, m, k)
    log_bound = ldim_log_bound(klass)
    rows = [
        BoundRow("advice", params, "class_size", len(klass), None, None),
        BoundRow("advice", params, "cdim_vs_double_class", cdim, cdim_limit, cdim <= cdim_limit),
        BoundRow("advice", params, "ldim", ldim, ldim_limit, ldim <= ldim_limit),
        BoundRow("advice", params, "ldim_vs_log_class_size", ldim, log_bound, ldim <= log_bound),
    ]
    return BoundReport(tuple(rows))


def nominal_bound_report(n: int, k: int, p: int) -> BoundReport:
    params = f"n={n},k={k},p={p}"
    limit = nominal_cdim_limit(n, k, p)
    # the same quantity assembled from its printed factors, as a cross-check
    factored = 2 * (n * (n + 1) // 2) * math.comb(p * n, k) * (3 * p * n) ** k
    rows = [
        BoundRow("nominal", params, "cdim_witness_bound", factored, limit, factored == limit),
    ]
    for arity in range(1, min(k, 5) + 1):
        rows.append(BoundRow("nominal", params, f"single_orbit_sets_dim_{arity}",
                             count_single_orbit_sets(arity), None, None))
    if n <= 2 and k <= 2:
        rows.append(BoundRow("nominal", params, "state_sets_exact",
                             count_state_sets(n, k), None, None))
        atoms = NominalSet.atoms_set()
        single = NominalSet((atoms.orbits[0],))
        rows.append(BoundRow("nominal", params, "transition_functions[Q=atoms]",
                             count_transition_functions(single, atoms), None, None))
    return BoundReport(tuple(rows))


def bound_report(setting: str, **params) -> BoundReport:
    if setting == "advice":
        return advice_bound_report(params["n"], params["m"], params["k"])
    if setting == "nominal":
        return nominal_bound_report(params["n"], params["k"], params["p"])
    raise ValueError(f"unknown setting {setting!r}")

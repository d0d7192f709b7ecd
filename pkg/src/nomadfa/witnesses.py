"""Constructive consistency witnesses: small sets of inputs on which a
language's restriction cannot be extended inside a class, with enough
provenance to replay the construction."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .advice_dfa import LanguageTable, distinguishing_suffix, mn_partition
from .concepts import Concept, ConceptClassHandle
from .nominal import AtomPermutation
from .nominal_dfa import NominalDFA, Word, distinguish_states, reachable_orbits, word_act, word_from_key, word_key

FULL_EXTENSION_DOMAIN_CAP = 20


class NotAWitnessCaseError(ValueError):
    """Raised when the precondition of a witness construction fails (the
    language is not actually outside the class in the witnessed way)."""


@dataclass(frozen=True)
class WitnessSet:
    """Points certifying that no class member extends the language there."""

    kind: str
    points: tuple[str, ...]
    labels: tuple[int, ...]
    claimed_bound: int
    provenance: dict

    def __post_init__(self):
        if len(self.points) != len(set(self.points)):
            raise ValueError("witness points must be distinct")
        if len(self.points) != len(self.labels):
            raise ValueError("labels must align with points")
        if len(self.points) > self.claimed_bound:
            raise ValueError(
                f"{len(self.points)} points exceed the claimed bound {self.claimed_bound}")

    def labeled_points(self) -> dict[str, int]:
        return dict(zip(self.points, self.labels))

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "points": list(self.points),
            "labels": list(self.labels),
            "claimed_bound": self.claimed_bound,
            "provenance": self.provenance,
        }

    @classmethod
    def from_record(cls, record: dict) -> "WitnessSet":
        return cls(record["kind"], tuple(record["points"]),
                   tuple(int(b) for b in record["labels"]),
                   int(record["claimed_bound"]), record["provenance"])


def _finish(kind: str, labeled: dict[str, int], claimed_bound: int, provenance: dict,
            sort_key=None) -> WitnessSet:
    points = tuple(sorted(labeled, key=sort_key or (lambda p: (len(p), p))))
    return WitnessSet(kind, points, tuple(labeled[p] for p in points),
                      claimed_bound, provenance)


def advice_witness(table: LanguageTable, n: int) -> WitnessSet:
    """Points forcing more than n future-equivalence classes at one length.

    Takes the least length with more than n classes, one representative per
    class for the first n+1 classes, and the shortest distinguishing suffix
    per pair; any extension of the restriction keeps the representatives
    pairwise inequivalent.
    """
    level = None
    for ell in range(table.horizon + 1):
        if mn_partition(table, ell).class_count > n:
            level = ell
            break
    if level is None:
        raise NotAWitnessCaseError(
            f"every length has at most {n} classes; nothing to witness")
    blocks = mn_partition(table, level).blocks
    representatives = [block[0] for block in blocks[:n + 1]]
    suffixes = {}
    labeled: dict[str, int] = {}
    for i, j in itertools.combinations(range(n + 1), 2):
        z = distinguishing_suffix(table, representatives[i], representatives[j])
        suffixes[f"{i},{j}"] = z
        for point in (representatives[i] + z, representatives[j] + z):
            labeled[point] = table.value(point)
    return _finish(
        "advice-classes", labeled, n * (n + 1),
        {"level": level, "n": n, "representatives": representatives, "suffixes": suffixes})


def _word_support(word: Word) -> tuple[int, ...]:
    return tuple(sorted({atom for letter in word.letters for atom in letter.atoms}))


def nominal_dimension_witness(machine: NominalDFA, k: int) -> WitnessSet:
    """Points forcing some word-class to keep a support of size k+1.

    Finds a reachable state orbit with least support of size at least k+1,
    swaps each chosen support atom with a distant fresh one, and records a
    separating suffix per swap; extensions must keep all the swaps visible,
    pinning one of each atom pair inside the support.
    """
    reach = reachable_orbits(machine)
    alphabet = machine.alphabet
    base_word = None
    for orbit in range(machine.states.orbit_count):
        if orbit not in reach.witnesses:
            continue
        rep = machine.states.canonical_rep(orbit)
        if len(machine.states.least_support(rep)) >= k + 1:
            base_word = reach.witnesses[orbit]
            break
    if base_word is None:
        raise NotAWitnessCaseError(
            f"every reachable state orbit has least support of size at most {k}")
    base_state = machine.state_after(base_word)
    support = tuple(sorted(machine.states.least_support(base_state)))
    chosen = support[:k + 1]
    shift = max(support) + 1
    labeled: dict[str, int] = {}
    suffixes = {}
    for atom in chosen:
        tau = AtomPermutation.transposition(atom, atom + shift)
        moved_word = word_act(alphabet, tau, base_word)
        suffix = distinguish_states(machine, machine.state_after(moved_word),
                                    machine, base_state)
        if suffix is None:
            raise AssertionError(
                "support atom swap did not change the state language; "
                "the automaton is not minimized")
        suffixes[str(atom)] = word_key(alphabet, suffix)
        for word in (moved_word.concat(suffix), base_word.concat(suffix)):
            key = word_key(alphabet, word)
            labeled[key] = int(machine.accepts_word(word))
    return _finish(
        "nominal-dimension", labeled, 2 * (k + 1),
        {"k": k, "base_word": word_key(alphabet, base_word),
         "support": list(support), "chosen": list(chosen),
         "shift": shift, "suffixes": suffixes})


def nominal_orbit_witness(machine: NominalDFA, n: int, k: int) -> WitnessSet:
    """Points forcing more than n orbits of word-classes.

    Representatives of n+1 distinct orbits (words of length at most n), and
    for every pair a family of injections of k-atom (or smaller) pieces of
    the first representative's support into the combined support pool, each
    extended to a permutation and paired with a separating suffix.
    """
    p = machine.alphabet.dimension
    if k > p * n:
        raise NotAWitnessCaseError(
            f"the size formula needs k <= p*n, got k={k}, p={p}, n={n}")
    reach = reachable_orbits(machine)
    if machine.states.orbit_count < n + 1 or len(reach.orbits) < n + 1:
        raise NotAWitnessCaseError(
            f"need at least {n + 1} reachable state orbits, have {len(reach.orbits)}")
    alphabet = machine.alphabet
    # discovery order is shortest-first, so the first n+1 witnesses fit in n letters
    ordered = sorted(reach.witnesses.values(), key=lambda w: (len(w), word_key(alphabet, w)))
    representatives = ordered[:n + 1]
    for word in representatives:
        if len(word) > n:
            raise AssertionError("representative longer than n letters")
    supports = [_word_support(word) for word in representatives]
    width = max(len(s) for s in supports)
    used = {atom for support in supports for atom in support}
    fresh_pool = []
    candidate = 0
    while len(fresh_pool) < width:
        if candidate not in used:
            fresh_pool.append(candidate)
        candidate += 1
    per_pair_cap = math.comb(p * n, k) * (3 * p * n) ** k
    labeled: dict[str, int] = {}
    pair_data = []
    for i, j in itertools.combinations(range(n + 1), 2):
        target = tuple(sorted({*supports[i], *supports[j], *fresh_pool}))
        piece = min(k, len(supports[i]))
        sigma_count = 0
        suffix_records = []
        state_j = machine.state_after(representatives[j])
        for piece_atoms in itertools.combinations(supports[i], piece):
            for images in itertools.permutations(target, piece):
                sigma_count += 1
                sigma = AtomPermutation.extend_injection(dict(zip(piece_atoms, images)))
                moved = word_act(alphabet, sigma, representatives[i])
                suffix = distinguish_states(machine, machine.state_after(moved),
                                            machine, state_j)
                if suffix is None:
                    raise AssertionError("representatives were not in distinct orbits")
                for word in (moved.concat(suffix), representatives[j].concat(suffix)):
                    key = word_key(alphabet, word)
                    labeled[key] = int(machine.accepts_word(word))
                suffix_records.append({
                    "piece": list(piece_atoms),
                    "images": list(images),
                    "suffix": word_key(alphabet, suffix),
                })
        if sigma_count > per_pair_cap:
            raise AssertionError(
                f"injection family for pair ({i},{j}) exceeds the per-pair cap")
        pair_data.append({"pair": [i, j], "sigmas": suffix_records})
    bound = 2 * math.comb(n + 1, 2) * per_pair_cap
    provenance = {
        "n": n, "k": k, "p": p,
        "representatives": [word_key(alphabet, w) for w in representatives],
        "supports": [list(s) for s in supports],
        "fresh_pool": fresh_pool,
        "pairs": pair_data,
    }
    if all(not s for s in supports):
        provenance["degenerate_support"] = True
    return _finish("nominal-orbits", labeled, bound, provenance)


def non_equivariance_witness(alphabet, labeled_words: dict[str, int]) -> WitnessSet:
    """Two concrete words in one orbit carrying different labels."""
    from .nominal_dfa import canonical_word

    by_canonical: dict[str, tuple[str, int]] = {}
    for key in sorted(labeled_words, key=lambda s: (len(s), s)):
        label = labeled_words[key]
        canonical = word_key(alphabet, canonical_word(alphabet, word_from_key(alphabet, key)))
        if canonical in by_canonical:
            first_key, first_label = by_canonical[canonical]
            if first_label != label:
                labeled = {first_key: first_label, key: label}
                return _finish("non-equivariance", labeled, 2,
                               {"canonical_form": canonical,
                                "first": first_key, "second": key})
        else:
            by_canonical[canonical] = (key, label)
    raise NotAWitnessCaseError("the table is equivariant on its domain")


@dataclass(frozen=True)
class WitnessValidation:
    ok: bool
    fixture_failures: tuple[str, ...]
    extensions_checked: int
    notes: tuple[str, ...]


def validate_witness(witness: WitnessSet, language_at, fixtures,
                     extension_class: ConceptClassHandle | None = None) -> WitnessValidation:
    """Check that the witness genuinely blocks the class.

    No fixture may agree with the source language on every point; when an
    enumerated class over a small finite domain is supplied, additionally
    every total extension of the restriction must fall outside it.
    """
    notes = []
    if not witness.points:
        return WitnessValidation(False, (), 0,
                                 ("an empty restriction extends to any member",))
    for point, stored in witness.labeled_points().items():
        if int(language_at(point)) != stored:
            return WitnessValidation(False, (), 0,
                                     (f"stored label for {point!r} does not replay",))
    failures = []
    for name, fixture_at in fixtures:
        if all(int(fixture_at(point)) == label
               for point, label in witness.labeled_points().items()):
            failures.append(name)
    extensions_checked = 0
    if extension_class is not None:
        domain = extension_class.domain
        if len(domain) > FULL_EXTENSION_DOMAIN_CAP:
            raise ValueError(
                f"full extension check capped at {FULL_EXTENSION_DOMAIN_CAP} instances")
        pinned = witness.labeled_points()
        if not set(pinned) <= set(domain.keys):
            raise ValueError("witness points are not instances of the class domain")
        free = [key for key in domain.keys if key not in pinned]
        for assignment in itertools.product((0, 1), repeat=len(free)):
            values = dict(pinned)
            values.update(zip(free, assignment))
            extension = Concept(domain, tuple(values[key] for key in domain.keys))
            extensions_checked += 1
            if extension in extension_class:
                failures.append(f"extension#{extensions_checked}")
        notes.append(f"quantified over {extensions_checked} total extensions")
    return WitnessValidation(not failures, tuple(failures), extensions_checked, tuple(notes))


def replay_points(witness: WitnessSet, alphabet=None) -> tuple[str, ...]:
    """Rebuild the point set from stored provenance alone."""
    prov = witness.provenance
    labeled: dict[str, None] = {}
    if witness.kind == "advice-classes":
        reps = prov["representatives"]
        for pair, z in prov["suffixes"].items():
            i, j = (int(part) for part in pair.split(","))
            labeled[reps[i] + z] = None
            labeled[reps[j] + z] = None
    elif witness.kind == "nominal-dimension":
        base = word_from_key(alphabet, prov["base_word"])
        for atom_text, suffix_key in prov["suffixes"].items():
            atom = int(atom_text)
            tau = AtomPermutation.transposition(atom, atom + prov["shift"])
            suffix = word_from_key(alphabet, suffix_key)
            labeled[word_key(alphabet, word_act(alphabet, tau, base).concat(suffix))] = None
            labeled[word_key(alphabet, base.concat(suffix))] = None
    elif witness.kind == "nominal-orbits":
        reps = [word_from_key(alphabet, key) for key in prov["representatives"]]
        for pair in prov["pairs"]:
            i, j = pair["pair"]
            for record in pair["sigmas"]:
                sigma = AtomPermutation.extend_injection(
                    dict(zip(record["piece"], record["images"])))
                suffix = word_from_key(alphabet, record["suffix"])
                moved = word_act(alphabet, sigma, reps[i])
                labeled[word_key(alphabet, moved.concat(suffix))] = None
                labeled[word_key(alphabet, reps[j].concat(suffix))] = None
    elif witness.kind == "non-equivariance":
        labeled[prov["first"]] = None
        labeled[prov["second"]] = None
    else:
        raise ValueError(f"unknown witness kind {witness.kind!r}")
    return tuple(sorted(labeled, key=lambda point: (len(point), point)))

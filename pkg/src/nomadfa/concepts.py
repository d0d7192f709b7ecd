"""Finite instance spaces, total and partial boolean concepts, and
n-consistency of a concept with a class."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .advice_dfa import LanguageTable, domain_strings
from .nominal import NominalSet
from .nominal_dfa import EMPTY_WORD, NominalDFA, Word, extension_letters, word_from_key, word_key


class DomainMismatchError(ValueError):
    """Raised when concepts over different domains are combined."""


@dataclass(frozen=True)
class Domain:
    """An ordered finite instance space of opaque string keys."""

    keys: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.keys)) != len(self.keys):
            raise ValueError("domain keys must be unique")

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def index(self, key: str) -> int:
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"{key!r} is not a domain instance") from None

    @cached_property
    def _index(self) -> dict[str, int]:
        return {k: i for i, k in enumerate(self.keys)}


@dataclass(frozen=True)
class Concept:
    """A total boolean labeling of the domain, aligned with its key order."""

    domain: Domain
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != len(self.domain):
            raise ValueError("concept must label every instance")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("labels are 0/1")

    def value(self, key: str) -> int:
        return self.bits[self.domain.index(key)]

    def restrict(self, keys) -> "PartialConcept":
        return PartialConcept.from_dict(self.domain, {k: self.value(k) for k in keys})

    def defined_keys(self) -> tuple[str, ...]:
        return self.domain.keys


@dataclass(frozen=True)
class PartialConcept:
    """A boolean labeling of part of the domain."""

    domain: Domain
    entries: tuple[tuple[str, int], ...]

    def __post_init__(self):
        keys = [k for k, _ in self.entries]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate keys in partial concept")
        for k, b in self.entries:
            if k not in self.domain or b not in (0, 1):
                raise ValueError(f"bad entry ({k!r}, {b})")

    @classmethod
    def from_dict(cls, domain: Domain, assignments: dict[str, int]) -> "PartialConcept":
        entries = tuple(sorted(assignments.items(), key=lambda kv: domain.index(kv[0])))
        return cls(domain, entries)

    def as_dict(self) -> dict[str, int]:
        return dict(self.entries)

    def defined_keys(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.entries)

    def value(self, key: str) -> int:
        return self.as_dict()[key]

    @property
    def size(self) -> int:
        return len(self.entries)


def is_extension(b, a) -> bool:
    """Whether b agrees with a on every instance a defines (and defines them all)."""
    if b.domain != a.domain:
        raise DomainMismatchError("extension requires a shared domain")
    b_defined = set(b.defined_keys())
    return all(k in b_defined and b.value(k) == bit
               for k, bit in (a.entries if isinstance(a, PartialConcept)
                              else zip(a.domain.keys, a.bits)))


@dataclass(frozen=True)
class ConceptClassHandle:
    """A deduplicated finite concept class, optionally tagged with the
    automaton that produced each member."""

    domain: Domain
    members: tuple[Concept, ...]
    provenance: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.members:
            raise ValueError("a concept class is nonempty")
        if any(m.domain != self.domain for m in self.members):
            raise DomainMismatchError("members must share the class domain")
        if len({m.bits for m in self.members}) != len(self.members):
            raise ValueError("duplicate members")
        if self.provenance is not None and len(self.provenance) != len(self.members):
            raise ValueError("provenance must align with members")

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, concept: Concept) -> bool:
        return concept.bits in self._bit_set

    @cached_property
    def _bit_set(self) -> frozenset:
        return frozenset(m.bits for m in self.members)


def handle_to_record(klass: ConceptClassHandle) -> dict:
    return {
        "domain": list(klass.domain.keys),
        "members": ["".join(str(b) for b in m.bits) for m in klass.members],
        "provenance": list(klass.provenance) if klass.provenance else None,
    }


def handle_from_record(record: dict) -> ConceptClassHandle:
    domain = Domain(tuple(record["domain"]))
    members = tuple(Concept(domain, tuple(int(ch) for ch in bits))
                    for bits in record["members"])
    provenance = record.get("provenance")
    return ConceptClassHandle(domain, members,
                              tuple(provenance) if provenance else None)


def is_n_consistent(concept, klass: ConceptClassHandle, n: int):
    """Whether every size-n restriction of the concept extends to a member.

    Returns (True, None) or (False, witness restriction).  Restrictions are
    scanned in domain order, so the witness is deterministic.
    """
    if concept.domain != klass.domain:
        raise DomainMismatchError("concept and class domains differ")
    defined = concept.defined_keys()
    if n > len(defined):
        return True, None
    values = {k: concept.value(k) for k in defined}
    member_values = [
        {k: m.value(k) for k in defined}
        for m in klass.members
    ]
    for subset in itertools.combinations(defined, n):
        if not any(all(mv[k] == values[k] for k in subset) for mv in member_values):
            witness = PartialConcept.from_dict(concept.domain, {k: values[k] for k in subset})
            return False, witness
    return True, None


def class_from_automata(sources, domain: Domain) -> ConceptClassHandle:
    """Restrict a list of (label, key -> bool) machines to the domain,
    deduplicating languages; the first label producing each distinct member
    is kept, and members are ordered by bit-vector."""
    by_bits: dict[tuple[int, ...], str] = {}
    for label, evaluate in sources:
        bits = tuple(int(bool(evaluate(key))) for key in domain.keys)
        by_bits.setdefault(bits, label)
    ordered = sorted(by_bits)
    return ConceptClassHandle(
        domain,
        tuple(Concept(domain, bits) for bits in ordered),
        tuple(by_bits[bits] for bits in ordered),
    )


def all_concepts(domain: Domain) -> ConceptClassHandle:
    """Every total concept on the domain."""
    members = tuple(Concept(domain, bits)
                    for bits in itertools.product((0, 1), repeat=len(domain)))
    return ConceptClassHandle(domain, members)


def advice_domain(sigma, horizon: int) -> Domain:
    return Domain(tuple(domain_strings(tuple(sigma), horizon)))


def concept_from_table(domain: Domain, table: LanguageTable) -> Concept:
    return Concept(domain, tuple(table.value(k) for k in domain.keys))


def table_from_concept(concept: Concept, sigma, horizon: int) -> LanguageTable:
    return LanguageTable.from_dict(tuple(sigma), horizon,
                                   dict(zip(concept.domain.keys, concept.bits)))


def handle_from_tables(tables, provenance_prefix: str = "advice") -> ConceptClassHandle:
    if not tables:
        raise ValueError("no language tables given")
    domain = advice_domain(tables[0].sigma, tables[0].horizon)
    members = []
    provenance = []
    for i, table in enumerate(tables):
        members.append(concept_from_table(domain, table))
        provenance.append(f"{provenance_prefix}[{i}]")
    return ConceptClassHandle(domain, tuple(members), tuple(provenance))


def canonical_words_up_to(alphabet: NominalSet, max_len: int) -> list[Word]:
    """All canonical words (atoms renamed by first use) of length <= max_len,
    shortest first, lexicographically within a length."""
    out = [EMPTY_WORD]
    level = [(EMPTY_WORD, 0)]
    for _ in range(max_len):
        extended = []
        for word, used in level:
            for letter in extension_letters(alphabet, tuple(range(used)), used):
                extended.append((Word(word.letters + (letter,)),
                                 max([used - 1, *letter.atoms]) + 1))
        out.extend(word for word, _ in extended)
        level = extended
    return out


def nominal_word_domain(alphabet: NominalSet, max_len: int) -> Domain:
    return Domain(tuple(word_key(alphabet, word)
                        for word in canonical_words_up_to(alphabet, max_len)))


def handle_from_nominal_automata(named_machines, max_len: int) -> ConceptClassHandle:
    """Concept class of nominal languages restricted to canonical words.

    Membership of an arbitrary word depends only on its canonical form, since
    recognized languages are closed under the atom action; so the canonical
    words up to the length cap carry the restriction faithfully.
    """
    machines = list(named_machines)
    if not machines:
        raise ValueError("no automata given")
    alphabet = machines[0][1].alphabet
    domain = nominal_word_domain(alphabet, max_len)

    def evaluator(machine: NominalDFA):
        return lambda key: machine.accepts_word(word_from_key(alphabet, key))

    return class_from_automata(
        [(name, evaluator(machine)) for name, machine in machines], domain)

"""Teacher oracles and (EQ+MQ) learners over finite concept classes, with
query-count audits against the dimension product."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .concepts import Concept, ConceptClassHandle
from .dimensions import cdim_exact, ldim_exact

QUERY_BUDGET_FACTOR = 4  # measured total <= factor * cdim * ldim in suite audits


class IllegalHypothesisError(ValueError):
    """Raised when an equivalence query lies outside the hypothesis class."""


class InconsistentTeacherError(RuntimeError):
    """Raised when no candidate concept is consistent with the teacher's
    answers (the target was outside the declared class)."""


@dataclass
class Transcript:
    """Ordered log of queries and answers for one learning session."""

    entries: list[tuple[str, str, str]] = field(default_factory=list)

    def record_mq(self, key: str, answer: int):
        self.entries.append(("MQ", key, str(answer)))

    def record_eq(self, hypothesis: Concept, answer: str):
        self.entries.append(("EQ", "".join(map(str, hypothesis.bits)), answer))

    @property
    def eq_count(self) -> int:
        return sum(1 for kind, _, _ in self.entries if kind == "EQ")

    @property
    def mq_count(self) -> int:
        return sum(1 for kind, _, _ in self.entries if kind == "MQ")

    @property
    def total(self) -> int:
        return len(self.entries)

    def succeeded(self) -> bool:
        return bool(self.entries) and self.entries[-1][0] == "EQ" \
            and self.entries[-1][2] == "yes"


class Teacher:
    """Answers queries for a fixed target; equivalence counterexamples are the
    first disagreement in domain order."""

    def __init__(self, target: Concept, hypothesis_class: ConceptClassHandle,
                 concept_class: ConceptClassHandle | None = None):
        if target.domain != hypothesis_class.domain:
            raise ValueError("target and hypothesis class domains differ")
        if concept_class is not None:
            if target not in concept_class:
                raise ValueError("target must belong to the declared concept class")
            if any(member not in hypothesis_class for member in concept_class.members):
                raise ValueError("the concept class must sit inside the hypothesis class")
        self.target = target
        self.hypothesis_class = hypothesis_class

    def membership_query(self, key: str, transcript: Transcript) -> int:
        answer = self.target.value(key)  # raises KeyError for foreign instances
        transcript.record_mq(key, answer)
        return answer

    def equivalence_query(self, hypothesis: Concept, transcript: Transcript) -> str | None:
        if hypothesis not in self.hypothesis_class:
            raise IllegalHypothesisError("hypothesis outside the hypothesis class")
        for key, bit in zip(self.target.domain.keys, self.target.bits):
            if hypothesis.value(key) != bit:
                transcript.record_eq(hypothesis, key)
                return key
        transcript.record_eq(hypothesis, "yes")
        return None


def _majority(domain, version: list[Concept]) -> Concept:
    bits = []
    for position in range(len(domain)):
        ones = sum(member.bits[position] for member in version)
        bits.append(1 if 2 * ones > len(version) else 0)
    return Concept(domain, tuple(bits))


def _most_balanced_split(domain, version: list[Concept]) -> str | None:
    best_key = None
    best_score = None
    for position, key in enumerate(domain.keys):
        ones = sum(member.bits[position] for member in version)
        if 0 < ones < len(version):
            score = abs(2 * ones - len(version))
            if best_score is None or score < best_score:
                best_key, best_score = key, score
    return best_key


def halving_learn(klass: ConceptClassHandle, hypotheses: ConceptClassHandle,
                  teacher: Teacher, mode: str = "eq+mq") -> Transcript:
    """Version-space halving: submit the majority vote when it is a legal
    hypothesis, otherwise query the most informative instance (or fall back
    to the first surviving candidate in eq-only mode).

    Every answered query removes at least one candidate, and a counterexample
    to the majority removes at least half.
    """
    if mode not in ("eq-only", "eq+mq"):
        raise ValueError(f"unknown mode {mode!r}")
    domain = klass.domain
    version = list(klass.members)
    transcript = Transcript()
    while True:
        if not version:
            raise InconsistentTeacherError("no candidate is consistent with the answers")
        if len(version) == 1:
            hypothesis = version[0]
        else:
            majority = _majority(domain, version)
            if majority in hypotheses:
                hypothesis = majority
            elif mode == "eq+mq":
                key = _most_balanced_split(domain, version)
                answer = teacher.membership_query(key, transcript)
                version = [m for m in version if m.value(key) == answer]
                continue
            else:
                hypothesis = version[0]
        counterexample = teacher.equivalence_query(hypothesis, transcript)
        if counterexample is None:
            return transcript
        revealed = 1 - hypothesis.value(counterexample)
        version = [m for m in version if m.value(counterexample) == revealed]


def consistent_learn(klass: ConceptClassHandle, hypotheses: ConceptClassHandle,
                     teacher: Teacher) -> Transcript:
    """Submit the first unrefuted class member, in class order; each
    counterexample refutes at least the submitted member."""
    del hypotheses  # members of the class are legal hypotheses by contract
    version = list(klass.members)
    transcript = Transcript()
    while True:
        if not version:
            raise InconsistentTeacherError("no candidate is consistent with the answers")
        hypothesis = version[0]
        counterexample = teacher.equivalence_query(hypothesis, transcript)
        if counterexample is None:
            return transcript
        revealed = 1 - hypothesis.value(counterexample)
        version = [m for m in version if m.value(counterexample) == revealed]


SUITE_COLUMNS = ["setting", "params", "target_id", "eq", "mq", "total",
                 "ldim", "cdim", "cd_product", "bound_ok"]


@dataclass(frozen=True)
class SuiteRow:
    setting: str
    params: str
    target_id: str
    eq: int
    mq: int
    total: int
    ldim: int
    cdim: object
    cd_product: object
    bound_ok: bool

    def csv_values(self) -> list[str]:
        return [self.setting, self.params, self.target_id, str(self.eq), str(self.mq),
                str(self.total), str(self.ldim), str(self.cdim), str(self.cd_product),
                str(self.bound_ok).lower()]


def run_suite(setting: str, params: str, klass: ConceptClassHandle,
              hypotheses: ConceptClassHandle, learner: str = "halving",
              mode: str = "eq+mq") -> list[SuiteRow]:
    """Learn every member of the class as a target and audit query counts
    against the dimension product."""
    ldim, _ = ldim_exact(klass)
    cdim = cdim_exact(klass, hypotheses)
    cd_product = cdim * ldim if cdim != math.inf else math.inf
    rows = []
    for index, target in enumerate(klass.members):
        teacher = Teacher(target, hypotheses, klass)
        if learner == "halving":
            transcript = halving_learn(klass, hypotheses, teacher, mode=mode)
        elif learner == "consistent":
            transcript = consistent_learn(klass, hypotheses, teacher)
        else:
            raise ValueError(f"unknown learner {learner!r}")
        if not transcript.succeeded():
            raise AssertionError("learning session ended without identifying the target")
        target_id = klass.provenance[index] if klass.provenance else f"target{index}"
        rows.append(SuiteRow(
            setting, params, target_id,
            transcript.eq_count, transcript.mq_count, transcript.total,
            ldim, cdim, cd_product,
            bool(transcript.total <= QUERY_BUDGET_FACTOR * cd_product),
        ))
    return rows


def replay_transcript(transcript: Transcript, target: Concept,
                      klass: ConceptClassHandle | None = None) -> bool:
    """Audit a finished transcript against its target.

    Checks that the final entry is a successful equivalence query, that every
    counterexample genuinely separates the submitted hypothesis from the
    target, and that every membership answer matches the target.  Given the
    concept class, additionally checks that no membership query asked an
    instance whose answer the surviving candidates already agreed on.
    """
    if not transcript.succeeded():
        return False
    domain = target.domain
    version = list(klass.members) if klass is not None else None
    for kind, payload, answer in transcript.entries:
        if kind == "MQ":
            if int(answer) != target.value(payload):
                return False
            if version is not None:
                values = {m.value(payload) for m in version}
                if len(values) != 2:
                    return False  # the answer was already determined
                version = [m for m in version if m.value(payload) == int(answer)]
        else:
            hypothesis = Concept(domain, tuple(int(b) for b in payload))
            if answer == "yes":
                if hypothesis.bits != target.bits:
                    return False
            else:
                if hypothesis.value(answer) == target.value(answer):
                    return False
                if version is not None:
                    version = [m for m in version
                               if m.value(answer) == target.value(answer)]
    return True

"""Nominal DFAs: run semantics, reachability, language equivalence with
counterexamples, and Myhill-Nerode minimization.

The transition function is stored per orbit of the states-times-alphabet
product as a target orbit plus a coordinate injection; concrete steps locate
the pair in its product orbit and apply the injection.  Equivalence over the
infinite alphabet is decided on the finite graph of product-orbit patterns,
never by bounded-length sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nominal import (
    AtomPermutation,
    Element,
    EquivariantMap,
    NominalSet,
    ProductSet,
    fresh_atom,
    joint_orbit_key,
    orbits_of_product,
    quotient,
    set_from_record,
    set_to_record,
)

SEARCH_NODE_CAP = 200_000


class AlphabetMismatchError(ValueError):
    """Raised for letters outside an automaton's alphabet, or when two
    automata over different alphabets are compared."""


@dataclass(frozen=True)
class Word:
    """A string over a nominal alphabet."""

    letters: tuple[Element, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def atoms(self) -> list[int]:
        return [a for letter in self.letters for a in letter.atoms]

    def concat(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)


EMPTY_WORD = Word(())


def word_act(alphabet: NominalSet, pi: AtomPermutation, word: Word) -> Word:
    return Word(tuple(alphabet.act(pi, letter) for letter in word.letters))


def canonical_word(alphabet: NominalSet, word: Word) -> Word:
    """The same word with atoms renamed by first occurrence."""
    renaming: dict[int, int] = {}
    for letter in word.letters:
        for atom in letter.atoms:
            renaming.setdefault(atom, len(renaming))
    pi = AtomPermutation.extend_injection(renaming)
    return word_act(alphabet, pi, word)


def word_key(alphabet: NominalSet, word: Word) -> str:
    """Compact textual form; plain atom sequences for the atoms alphabet."""
    simple = alphabet.orbit_count == 1 and alphabet.orbits[0].arity == 1
    parts = []
    for letter in word.letters:
        if simple:
            parts.append(str(letter.atoms[0]))
        else:
            parts.append(f"{letter.orbit}:{','.join(str(a) for a in letter.atoms)}")
    return " ".join(parts)


def word_from_key(alphabet: NominalSet, key: str) -> Word:
    key = key.strip()
    if not key:
        return EMPTY_WORD
    letters = []
    for token in key.split():
        if ":" in token:
            orbit_text, atoms_text = token.split(":", 1)
            atoms = tuple(int(a) for a in atoms_text.split(",")) if atoms_text else ()
            letters.append(alphabet.element(int(orbit_text), atoms))
        else:
            letters.append(alphabet.element(0, (int(token),)))
    return Word(tuple(letters))


class NominalDFA:
    """A deterministic automaton over an orbit-finite alphabet."""

    def __init__(self, alphabet: NominalSet, states: NominalSet, initial_orbit: int,
                 accepting: frozenset[int], product: ProductSet, transition: EquivariantMap):
        if states.orbits[initial_orbit].arity != 0:
            raise ValueError("the initial state must sit in an arity-0 orbit "
                             "(its orbit is a single equivariant point)")
        if not accepting <= set(range(states.orbit_count)):
            raise ValueError("accepting orbits out of range")
        if product.left is not states or product.right is not alphabet:
            raise ValueError("product must be states x alphabet")
        if transition.source is not product.set or transition.target is not states:
            raise ValueError("transition must map the product set to the states")
        transition.validate()
        self.alphabet = alphabet
        self.states = states
        self.initial = Element(initial_orbit, ())
        self.accepting = frozenset(accepting)
        self.product = product
        self.transition = transition

    @classmethod
    def compile(cls, alphabet: NominalSet, states: NominalSet, initial_orbit: int,
                accepting, delta) -> "NominalDFA":
        """Build the orbit-wise transition table from a concrete step function.

        delta(state Element, letter Element) -> state Element must be
        equivariant; each product-orbit anchor fixes one table case, and the
        case conditions plus sampled commuting checks reject step functions
        that are not.
        """
        product = orbits_of_product(states, alphabet)
        cases = []
        for info in product.orbit_infos:
            state_anchor, letter_anchor = info.anchor
            image = delta(state_anchor, letter_anchor)
            if not states.contains(image):
                raise ValueError(f"step function left the state set at {info.anchor}")
            anchor_atoms = set(state_anchor.atoms) | set(letter_anchor.atoms)
            if not set(image.atoms) <= anchor_atoms:
                raise ValueError(
                    f"step function invented atoms at {info.anchor}: {image}")
            # anchor atoms are exactly 0..k-1, so atom a is tuple position a
            cases.append((image.orbit, image.atoms))
        transition = EquivariantMap(product.set, states, tuple(cases))
        machine = cls(alphabet, states, initial_orbit, frozenset(accepting),
                      product, transition)
        machine._check_step_samples(delta)
        return machine

    def _check_step_samples(self, delta):
        for info in self.product.orbit_infos:
            state_anchor, letter_anchor = info.anchor
            width = info.rep.arity + 1
            rotate = AtomPermutation.from_mapping(
                {i: (i + 1) % width for i in range(width)})
            for pi in (rotate, AtomPermutation.transposition(0, width)):
                q = self.states.act(pi, state_anchor)
                a = self.alphabet.act(pi, letter_anchor)
                if self.step(q, a) != delta(q, a):
                    raise ValueError("step function is not equivariant "
                                     f"near {info.anchor} under {pi}")

    def check_letter(self, letter: Element):
        if not self.alphabet.contains(letter):
            raise AlphabetMismatchError(f"letter {letter} is not in the alphabet")

    def step(self, state: Element, letter: Element) -> Element:
        return self.transition.apply(self.product.locate(state, letter))

    def run(self, word: Word) -> tuple[Element, ...]:
        trace = [self.initial]
        for letter in word.letters:
            self.check_letter(letter)
            trace.append(self.step(trace[-1], letter))
        return tuple(trace)

    def state_after(self, word: Word) -> Element:
        return self.run(word)[-1]

    def run_from(self, state: Element, word: Word) -> Element:
        for letter in word.letters:
            self.check_letter(letter)
            state = self.step(state, letter)
        return state

    def is_accepting_state(self, state: Element) -> bool:
        return state.orbit in self.accepting

    def accepts_word(self, word: Word) -> bool:
        return self.is_accepting_state(self.state_after(word))


def accepts(machine: NominalDFA, word: Word) -> tuple[bool, tuple[Element, ...]]:
    """Acceptance together with the run trace."""
    trace = machine.run(word)
    return machine.is_accepting_state(trace[-1]), trace


def extension_letters(alphabet: NominalSet, allowed: tuple[int, ...],
                      next_fresh: int) -> list[Element]:
    """Letters usable after a context mentioning `allowed`: atoms from the
    context plus fresh ones, fresh atoms numbered consecutively from
    next_fresh in order of first occurrence.  Sorted by (orbit, atoms)."""
    out = []
    for orbit, rep in enumerate(alphabet.orbits):
        pool = [*allowed, *range(next_fresh, next_fresh + rep.arity)]
        for letter in alphabet.elements_over(orbit, pool):
            introduced = []
            for atom in letter.atoms:
                if atom >= next_fresh and atom not in introduced:
                    introduced.append(atom)
            if introduced == list(range(next_fresh, next_fresh + len(introduced))):
                out.append(letter)
    return out


@dataclass(frozen=True)
class Reachability:
    orbits: tuple[int, ...]
    witnesses: dict[int, Word]


def reachable_orbits(machine: NominalDFA) -> Reachability:
    """State orbits reachable by some word, with the shortest canonical
    lexicographically-least witness word per orbit.

    One expansion per orbit suffices: later arrivals in an already-seen orbit
    are images of the first arrival under an atom permutation, so their
    extensions reach the same orbits via no-smaller words.
    """
    witnesses: dict[int, Word] = {machine.initial.orbit: EMPTY_WORD}
    frontier = [((), machine.initial, 0)]
    while frontier:
        next_frontier = []
        for letters, state, used in frontier:
            for letter in extension_letters(machine.alphabet, tuple(range(used)), used):
                successor = machine.step(state, letter)
                if successor.orbit in witnesses:
                    continue
                extended = letters + (letter,)
                witnesses[successor.orbit] = Word(extended)
                next_frontier.append(
                    (extended, successor, max([used - 1, *letter.atoms]) + 1))
        frontier = next_frontier
    return Reachability(tuple(sorted(witnesses)), witnesses)


def _difference_search(m1: NominalDFA, m2: NominalDFA, start1: Element, start2: Element,
                       allowed: tuple[int, ...], next_fresh: int) -> Word | None:
    """Shortest (then lexicographically least) suffix on which the two runs
    disagree, or None if no suffix separates them.

    Nodes are deduplicated by the joint orbit pattern of the state pair:
    pattern-equal pairs are related by an atom permutation, and acceptance
    differences transport along it.
    """
    sets = (m1.states, m2.states)

    def differs(s1, s2):
        return m1.is_accepting_state(s1) != m2.is_accepting_state(s2)

    if differs(start1, start2):
        return EMPTY_WORD
    seen = {joint_orbit_key(sets, (start1, start2))}
    frontier = [((), start1, start2, allowed, next_fresh)]
    explored = 0
    while frontier:
        next_frontier = []
        for letters, s1, s2, atoms, fresh in frontier:
            for letter in extension_letters(m1.alphabet, atoms, fresh):
                explored += 1
                if explored > SEARCH_NODE_CAP:
                    raise RuntimeError("difference search exceeded its node budget")
                n1 = m1.step(s1, letter)
                n2 = m2.step(s2, letter)
                extended = letters + (letter,)
                if differs(n1, n2):
                    return Word(extended)
                key = joint_orbit_key(sets, (n1, n2))
                if key in seen:
                    continue
                seen.add(key)
                new_atoms = tuple(sorted({*atoms, *letter.atoms}))
                next_frontier.append(
                    (extended, n1, n2, new_atoms, max([fresh - 1, *letter.atoms]) + 1))
        frontier = next_frontier
    return None


def equivalence_check(m1: NominalDFA, m2: NominalDFA) -> Word | None:
    """None when the two automata recognize the same language, otherwise the
    shortest canonical lexicographically-least word on which they differ."""
    if m1.alphabet != m2.alphabet:
        raise AlphabetMismatchError("automata must share an alphabet")
    return _difference_search(m1, m2, m1.initial, m2.initial, (), 0)


def distinguish_states(m1: NominalDFA, s1: Element, m2: NominalDFA, s2: Element) -> Word | None:
    """A suffix separating the languages of two states, or None."""
    if m1.alphabet != m2.alphabet:
        raise AlphabetMismatchError("automata must share an alphabet")
    atoms = tuple(sorted({*s1.atoms, *s2.atoms}))
    return _difference_search(m1, m2, s1, s2, atoms, fresh_atom(atoms))


def restrict_to_reachable(machine: NominalDFA) -> tuple[NominalDFA, Reachability]:
    reach = reachable_orbits(machine)
    if reach.orbits == tuple(range(machine.states.orbit_count)):
        return machine, reach
    old_to_new = {old: new for new, old in enumerate(reach.orbits)}
    states = NominalSet(tuple(machine.states.orbits[old] for old in reach.orbits))

    def delta(state: Element, letter: Element) -> Element:
        image = machine.step(Element(reach.orbits[state.orbit], state.atoms), letter)
        return Element(old_to_new[image.orbit], image.atoms)

    restricted = NominalDFA.compile(
        machine.alphabet, states, old_to_new[machine.initial.orbit],
        frozenset(old_to_new[o] for o in machine.accepting if o in old_to_new), delta)
    witnesses = {old_to_new[o]: w for o, w in reach.witnesses.items()}
    return restricted, Reachability(tuple(sorted(witnesses)), witnesses)


@dataclass(frozen=True, eq=False)
class Minimization:
    automaton: NominalDFA
    homomorphism: EquivariantMap
    reachable_part: NominalDFA
    witnesses: dict[int, Word]


def minimize(machine: NominalDFA) -> Minimization:
    """The minimal automaton for the language, with the surjective automaton
    homomorphism from the reachable part onto it.

    Partition refinement lifted to orbits of state pairs: a pair orbit is
    marked distinguishable when its members disagree on acceptance, then
    marks propagate backwards over one-letter steps until a fixpoint; the
    remaining relation is language equivalence of states, and quotienting by
    it realizes the future-equivalence classes of words reachable in the
    automaton.
    """
    reachable, reach = restrict_to_reachable(machine)
    pairs = orbits_of_product(reachable.states, reachable.states)
    bad = [
        (info.source_pair[0] in reachable.accepting) != (info.source_pair[1] in reachable.accepting)
        for info in pairs.orbit_infos
    ]
    changed = True
    while changed:
        changed = False
        for index, info in enumerate(pairs.orbit_infos):
            if bad[index]:
                continue
            q1, q2 = info.anchor
            arity = pairs.set.orbits[index].arity
            for letter in extension_letters(reachable.alphabet, tuple(range(arity)), arity):
                successor = pairs.locate(reachable.step(q1, letter), reachable.step(q2, letter))
                if bad[successor.orbit]:
                    bad[index] = True
                    changed = True
                    break

    def language_equivalent(a: Element, b: Element) -> bool:
        return not bad[pairs.locate(a, b).orbit]

    result = quotient(reachable.states, language_equivalent)
    projection = result.projection
    accepting = frozenset(projection.cases[o][0] for o in reachable.accepting)
    for orbit in range(reachable.states.orbit_count):
        target = projection.cases[orbit][0]
        if (orbit in reachable.accepting) != (target in accepting):
            raise AssertionError("quotient merged accepting with rejecting states")

    def delta(state: Element, letter: Element) -> Element:
        return projection.apply(reachable.step(result.lift(state), letter))

    minimal = NominalDFA.compile(
        reachable.alphabet, result.set,
        projection.apply(reachable.initial).orbit, accepting, delta)
    return Minimization(minimal, projection, reachable,
                        reachable_orbits(minimal).witnesses)


def short_witnesses(machine: NominalDFA) -> dict[int, Word]:
    """One representative word per state orbit of a minimized automaton; each
    has length strictly below the orbit count."""
    reach = reachable_orbits(machine)
    if len(reach.orbits) != machine.states.orbit_count:
        raise ValueError("short witnesses are defined for reachable (minimized) automata")
    bound = machine.states.orbit_count
    for orbit, word in reach.witnesses.items():
        if len(word) >= bound:
            raise AssertionError(
                f"witness for orbit {orbit} has length {len(word)}, expected < {bound}")
    return reach.witnesses


@dataclass(frozen=True)
class DimensionReport:
    orbit_count: int
    state_dimension: int
    alphabet_dimension: int
    bound: int
    ok: bool


def dimension_bound_check(machine: NominalDFA) -> DimensionReport:
    """State dimension against (orbit count - 1) times the alphabet dimension."""
    n = machine.states.orbit_count
    p = machine.alphabet.dimension
    dim = machine.states.dimension
    bound = (n - 1) * p
    return DimensionReport(n, dim, p, bound, dim <= bound)


def dfa_to_record(machine: NominalDFA) -> dict:
    transitions = []
    for i in range(machine.states.orbit_count):
        for j in range(machine.alphabet.orbit_count):
            for case, orbit_index in enumerate(machine.product.cases_for(i, j)):
                target, injection = machine.transition.cases[orbit_index]
                transitions.append({
                    "state_orbit": i,
                    "letter_orbit": j,
                    "product_orbit_case": case,
                    "target_orbit": target,
                    "injection": list(injection),
                })
    return {
        "alphabet": set_to_record(machine.alphabet),
        "states": set_to_record(machine.states),
        "initial": machine.initial.orbit,
        "accepting": sorted(machine.accepting),
        "transitions": transitions,
    }


def dfa_from_record(record: dict) -> NominalDFA:
    alphabet = set_from_record(record["alphabet"])
    states = set_from_record(record["states"])
    product = orbits_of_product(states, alphabet)
    cases: list[tuple[int, tuple[int, ...]] | None] = [None] * product.set.orbit_count
    for entry in record["transitions"]:
        group = product.cases_for(int(entry["state_orbit"]), int(entry["letter_orbit"]))
        index = group[int(entry["product_orbit_case"])]
        cases[index] = (int(entry["target_orbit"]),
                        tuple(int(p) for p in entry["injection"]))
    if any(c is None for c in cases):
        raise ValueError("transition table does not cover every product orbit")
    transition = EquivariantMap(product.set, states, tuple(cases))
    return NominalDFA(alphabet, states, int(record["initial"]),
                      frozenset(int(o) for o in record["accepting"]), product, transition)

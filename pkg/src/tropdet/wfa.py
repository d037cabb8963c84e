"""Min-plus weighted automata: model, text format, evaluation and configurations."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .tropical import INF, MinPlusMatrix, Weight, parse_weight, vector_mul, wmin

Word = tuple[str, ...]
Triple = tuple[str, str, str]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ValueError):
    pass


class UnknownLetter(ValueError):
    pass


class DeadConfiguration(ValueError):
    pass


class InvalidRun(ValueError):
    pass


class AlphabetCollision(ValueError):
    pass


class EmptyAutomaton(ValueError):
    pass


def _check_names(states: Sequence[str], alphabet: Sequence[str]) -> None:
    if len(set(states)) != len(states):
        raise ValidationError("duplicate state name")
    if len(set(alphabet)) != len(alphabet):
        raise ValidationError("duplicate letter")
    if not states:
        raise ValidationError("automaton has no states")


@dataclass(frozen=True)
class Wfa:
    """Single initial state, all states accepting; missing triples weigh INF."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    initial: str
    weights: Mapping[Triple, int] = field(compare=True)

    def __post_init__(self) -> None:
        _check_names(self.states, self.alphabet)
        if self.initial not in self.states:
            raise ValidationError(f"unknown initial state {self.initial!r}")
        for (p, s, q), c in self.weights.items():
            if p not in self.state_index or q not in self.state_index:
                raise ValidationError(f"transition references unknown state: {p} {s} {q}")
            if s not in self.alphabet:
                raise ValidationError(f"transition references unknown letter {s!r}")
            if not isinstance(c, int):
                raise ValidationError("transition weights must be finite integers")

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    def weight(self, p: str, letter: str, q: str) -> Weight:
        return self.weights.get((p, letter, q), INF)

    @cached_property
    def _successors(self) -> dict[tuple[str, str], tuple[tuple[str, int], ...]]:
        out: dict[tuple[str, str], list[tuple[str, int]]] = {}
        for (p, s, q), c in self.weights.items():
            out.setdefault((p, s), []).append((q, c))
        return {k: tuple(sorted(v, key=lambda qc: self.state_index[qc[0]])) for k, v in out.items()}

    def successors(self, p: str, letter: str) -> tuple[tuple[str, int], ...]:
        return self._successors.get((p, letter), ())

    @cached_property
    def _letter_matrices(self) -> dict[str, MinPlusMatrix]:
        n = len(self.states)
        out = {}
        for s in self.alphabet:
            rows = [[INF] * n for _ in range(n)]
            for (p, letter, q), c in self.weights.items():
                if letter == s:
                    rows[self.state_index[p]][self.state_index[q]] = c
            out[s] = MinPlusMatrix.from_rows(rows, n)
        return out

    def letter_matrix(self, letter: str) -> MinPlusMatrix:
        self.check_letter(letter)
        return self._letter_matrices[letter]

    def check_letter(self, letter: str) -> None:
        if letter not in self._letter_matrices:
            raise UnknownLetter(letter)

    @cached_property
    def letter_wmax(self) -> dict[str, int]:
        out = {s: 0 for s in self.alphabet}
        for (_, s, _), c in self.weights.items():
            out[s] = max(out[s], abs(c))
        return out

    def transitions(self) -> list[tuple[str, str, int, str]]:
        """All finite transitions in canonical order."""
        si, li = self.state_index, {s: i for i, s in enumerate(self.alphabet)}
        return sorted(
            ((p, s, c, q) for (p, s, q), c in self.weights.items()),
            key=lambda t: (si[t[0]], li[t[1]], si[t[3]]),
        )

    def is_deterministic(self) -> bool:
        return all(len(v) <= 1 for v in self._successors.values())


@dataclass(frozen=True)
class WfaIF:
    """Automaton with initial and final weights (finite entries only)."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    weights: Mapping[Triple, int]
    init: Mapping[str, int]
    fin: Mapping[str, int]

    def __post_init__(self) -> None:
        _check_names(self.states, self.alphabet)
        known = set(self.states)
        for (p, s, q) in self.weights:
            if p not in known or q not in known:
                raise ValidationError(f"transition references unknown state: {p} {s} {q}")
            if s not in self.alphabet:
                raise ValidationError(f"transition references unknown letter {s!r}")
        for q in list(self.init) + list(self.fin):
            if q not in known:
                raise ValidationError(f"unknown state {q!r}")
        if not self.init:
            raise ValidationError("no state has a finite initial weight")

    def evaluate(self, word: Sequence[str]) -> Weight:
        conf = {q: self.init.get(q, INF) for q in self.states}
        for letter in word:
            if letter not in self.alphabet:
                raise UnknownLetter(letter)
            nxt: dict[str, Weight] = {q: INF for q in self.states}
            for (p, s, q), c in self.weights.items():
                if s == letter and conf[p] is not INF:
                    v = conf[p] + c
                    if nxt[q] is INF or v < nxt[q]:
                        nxt[q] = v
            conf = nxt
        return wmin(conf[q] + self.fin[q] for q in self.states if q in self.fin)


@dataclass(frozen=True)
class Nfa:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    transitions: frozenset[Triple]

    def __post_init__(self) -> None:
        _check_names(self.states, self.alphabet)
        known = set(self.states)
        if self.initial not in known or not self.accepting <= known:
            raise ValidationError("unknown state in initial/accepting")
        for p, s, q in self.transitions:
            if p not in known or q not in known:
                raise ValidationError(f"transition references unknown state: {p} {s} {q}")
            if s not in self.alphabet:
                raise ValidationError(f"transition references unknown letter {s!r}")

    def accepts(self, word: Sequence[str]) -> bool:
        cur = {self.initial}
        for letter in word:
            cur = {q for (p, s, q) in self.transitions if s == letter and p in cur}
        return bool(cur & self.accepting)


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(r"\S+")


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]


def _parse_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = "" if raw.lstrip().startswith("#") else raw
        toks = _tokens(line)
        if toks:
            yield lineno, toks


def parse_wfa(text: str) -> Wfa | WfaIF:
    alphabet: tuple[str, ...] | None = None
    states: tuple[str, ...] | None = None
    initial: str | None = None
    weights: dict[Triple, int] = {}
    seen: set[Triple] = set()
    init: dict[str, int] = {}
    fin: dict[str, int] = {}
    has_if = False
    for lineno, toks in _parse_lines(text):
        key, col = toks[0]
        args = toks[1:]
        if key == "alphabet":
            alphabet = tuple(t for t, _ in args)
        elif key == "states":
            states = tuple(t for t, _ in args)
        elif key == "initial":
            if len(args) != 1:
                raise ParseError("expected: initial <state>", lineno, col)
            initial = args[0][0]
        elif key in ("init", "fin"):
            if len(args) != 2:
                raise ParseError(f"expected: {key} <state> <weight>", lineno, col)
            w = _weight(args[1], lineno)
            has_if = True
            target = init if key == "init" else fin
            if args[0][0] in target:
                raise ValidationError(f"duplicate {key} entry for {args[0][0]}")
            if w is not INF:
                target[args[0][0]] = w
        elif key == "trans":
            if len(args) != 4:
                raise ParseError("expected: trans <p> <letter> <weight> <q>", lineno, col)
            p, s, q = args[0][0], args[1][0], args[3][0]
            w = _weight(args[2], lineno)
            if (p, s, q) in seen:
                raise ValidationError(f"duplicate transition {p} {s} {q} (line {lineno})")
            seen.add((p, s, q))
            if w is not INF:
                weights[(p, s, q)] = w
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, col)
    if alphabet is None or states is None:
        raise ParseError("missing alphabet or states line", 1, 1)
    if has_if:
        if initial is not None:
            raise ValidationError("initial cannot be combined with init/fin lines")
        return WfaIF(states, alphabet, weights, init, fin)
    if initial is None:
        raise ParseError("missing initial line", 1, 1)
    return Wfa(states, alphabet, initial, weights)


def _weight(tok: tuple[str, int], lineno: int) -> Weight:
    try:
        return parse_weight(tok[0])
    except ValueError:
        raise ParseError(f"bad weight {tok[0]!r}", lineno, tok[1]) from None


def serialize_wfa(a: Wfa | WfaIF) -> str:
    lines = [f"alphabet {' '.join(a.alphabet)}", f"states {' '.join(a.states)}"]
    if isinstance(a, WfaIF):
        lines += [f"init {q} {a.init[q]}" for q in a.states if q in a.init]
        lines += [f"fin {q} {a.fin[q]}" for q in a.states if q in a.fin]
        si = {q: i for i, q in enumerate(a.states)}
        li = {s: i for i, s in enumerate(a.alphabet)}
        trans = sorted(a.weights.items(), key=lambda kv: (si[kv[0][0]], li[kv[0][1]], si[kv[0][2]]))
        lines += [f"trans {p} {s} {c} {q}" for (p, s, q), c in trans]
    else:
        lines.append(f"initial {a.initial}")
        lines += [f"trans {p} {s} {c} {q}" for p, s, c, q in a.transitions()]
    return "\n".join(lines) + "\n"


def parse_nfa(text: str) -> Nfa:
    alphabet = states = None
    initial = None
    accepting: set[str] = set()
    trans: set[Triple] = set()
    for lineno, toks in _parse_lines(text):
        key, col = toks[0]
        args = [t for t, _ in toks[1:]]
        if key == "alphabet":
            alphabet = tuple(args)
        elif key == "states":
            states = tuple(args)
        elif key == "initial":
            if len(args) != 1:
                raise ParseError("expected: initial <state>", lineno, col)
            initial = args[0]
        elif key == "accepting":
            accepting.update(args)
        elif key == "trans":
            if len(args) != 3:
                raise ParseError("expected: trans <p> <letter> <q>", lineno, col)
            t = (args[0], args[1], args[2])
            if t in trans:
                raise ValidationError(f"duplicate transition {' '.join(t)}")
            trans.add(t)
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, col)
    if alphabet is None or states is None or initial is None:
        raise ParseError("missing alphabet, states or initial line", 1, 1)
    return Nfa(states, alphabet, initial, frozenset(accepting), frozenset(trans))


def serialize_nfa(n: Nfa) -> str:
    si = {q: i for i, q in enumerate(n.states)}
    li = {s: i for i, s in enumerate(n.alphabet)}
    lines = [
        f"alphabet {' '.join(n.alphabet)}",
        f"states {' '.join(n.states)}",
        f"initial {n.initial}",
        f"accepting {' '.join(q for q in n.states if q in n.accepting)}",
    ]
    for p, s, q in sorted(n.transitions, key=lambda t: (si[t[0]], li[t[1]], si[t[2]])):
        lines.append(f"trans {p} {s} {q}")
    return "\n".join(lines) + "\n"


def parse_word(alphabet: Sequence[str], text: str) -> Word:
    """Split a word given either letter-by-letter or separated by spaces/commas."""
    text = text.strip()
    if text in ("", "eps", "ε"):
        return ()
    if re.search(r"[\s,]", text):
        letters = tuple(t for t in re.split(r"[\s,]+", text) if t)
    elif all(len(s) == 1 for s in alphabet):
        letters = tuple(text)
    else:
        letters = (text,)
    for s in letters:
        if s not in alphabet:
            raise UnknownLetter(s)
    return letters


# ------------------------------------------------------------ configurations


@dataclass(frozen=True)
class Configuration:
    """Total map from states to weights."""

    states: tuple[str, ...]
    values: tuple[Weight, ...]

    def __getitem__(self, q: str) -> Weight:
        return self.values[self.states.index(q)]

    @property
    def support(self) -> frozenset[str]:
        return frozenset(q for q, v in zip(self.states, self.values) if v is not INF)

    @property
    def minimum(self) -> Weight:
        return wmin(self.values)

    def normalized(self) -> "Configuration":
        m = self.minimum
        if m is INF:
            return self
        return Configuration(self.states, tuple(v if v is INF else v - m for v in self.values))

    def as_dict(self) -> dict[str, Weight]:
        return dict(zip(self.states, self.values))


def initial_configuration(a: Wfa) -> Configuration:
    return Configuration(a.states, tuple(0 if q == a.initial else INF for q in a.states))


def configuration(a: Wfa, values: Mapping[str, Weight]) -> Configuration:
    return Configuration(a.states, tuple(values.get(q, INF) for q in a.states))


def next_conf(a: Wfa, c: Configuration, word: Iterable[str]) -> Configuration:
    vec = c.values
    for letter in word:
        vec = vector_mul(vec, a.letter_matrix(letter))
    return Configuration(a.states, vec)


def evaluate(a: Wfa, word: Iterable[str]) -> Weight:
    return next_conf(a, initial_configuration(a), word).minimum


def shifted_step(a: Wfa, c: Configuration, letter: str) -> tuple[Configuration, Weight]:
    raw = next_conf(a, c, (letter,))
    emitted = raw.minimum
    if emitted is INF:
        raise DeadConfiguration(f"no run survives letter {letter!r}")
    return raw.normalized(), emitted


def effect_bounds(a: Wfa, word: Sequence[str]) -> tuple[int, int]:
    for s in word:
        a.check_letter(s)
    per = [a.letter_wmax[s] for s in word]
    return max(per, default=0), sum(per)


def boolean_reach(a: Wfa, states: Iterable[str], word: Iterable[str]) -> frozenset[str]:
    cur = set(states)
    for letter in word:
        a.check_letter(letter)
        cur = {q for p in cur for q, _ in a.successors(p, letter)}
    return frozenset(cur)


# ----------------------------------------------------------------------- runs


@dataclass(frozen=True)
class Transition:
    src: str
    letter: str
    weight: int
    dst: str


@dataclass(frozen=True)
class Run:
    start: str
    transitions: tuple[Transition, ...] = ()

    @property
    def word(self) -> Word:
        return tuple(t.letter for t in self.transitions)

    @property
    def states(self) -> tuple[str, ...]:
        return (self.start,) + tuple(t.dst for t in self.transitions)

    @property
    def weight(self) -> int:
        return sum(t.weight for t in self.transitions)

    def prefix_weights(self) -> tuple[int, ...]:
        out = [0]
        for t in self.transitions:
            out.append(out[-1] + t.weight)
        return tuple(out)


def run_from_states(a: Wfa, states: Sequence[str], word: Sequence[str]) -> Run:
    """Build the run visiting ``states`` on ``word``; raises InvalidRun if some step is missing."""
    if len(states) != len(word) + 1:
        raise InvalidRun("state sequence length must be |word| + 1")
    trans = []
    for p, s, q in zip(states, word, states[1:]):
        c = a.weight(p, s, q)
        if c is INF:
            raise InvalidRun(f"no transition {p} --{s}--> {q}")
        trans.append(Transition(p, s, c, q))
    return Run(states[0], tuple(trans))


def validate_run(a: Wfa, run: Run) -> None:
    cur = run.start
    if cur not in a.state_index:
        raise InvalidRun(f"unknown state {cur!r}")
    for t in run.transitions:
        if t.src != cur or a.weight(t.src, t.letter, t.dst) != t.weight:
            raise InvalidRun(f"bad transition {t}")
        cur = t.dst


def seamless_check(a: Wfa, c: Configuration, run: Run) -> bool:
    validate_run(a, run)
    if c[run.start] is INF:
        raise InvalidRun("run starts outside the configuration support")
    acc = c[run.start]
    conf = c
    for t in run.transitions:
        conf = next_conf(a, conf, (t.letter,))
        acc += t.weight
        if acc != conf[t.dst]:
            return False
    return True


# ------------------------------------------------------------ transformations


def validate_trim(a: Wfa) -> tuple[Wfa, tuple[str, ...]]:
    reach = {a.initial}
    frontier = [a.initial]
    while frontier:
        p = frontier.pop()
        for s in a.alphabet:
            for q, _ in a.successors(p, s):
                if q not in reach:
                    reach.add(q)
                    frontier.append(q)
    if a.initial not in reach:
        raise EmptyAutomaton("initial state removed")
    removed = tuple(q for q in a.states if q not in reach)
    if not removed:
        return a, ()
    kept = tuple(q for q in a.states if q in reach)
    weights = {k: v for k, v in a.weights.items() if k[0] in reach and k[2] in reach}
    return Wfa(kept, a.alphabet, a.initial, weights), removed


def fresh_name(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def strip_initial_final(a: WfaIF, start_letter: str = "s", final_letter: str = "f") -> Wfa:
    for letter in (start_letter, final_letter):
        if letter in a.alphabet:
            raise AlphabetCollision(f"letter {letter!r} already in the alphabet")
    s0 = fresh_name("s0", a.states)
    sf = fresh_name("sf", list(a.states) + [s0])
    weights = dict(a.weights)
    for q in a.states:
        if q in a.init:
            weights[(s0, start_letter, q)] = a.init[q]
        if q in a.fin:
            weights[(q, final_letter, sf)] = a.fin[q]
    return Wfa((s0,) + a.states + (sf,), a.alphabet + (start_letter, final_letter), s0, weights)

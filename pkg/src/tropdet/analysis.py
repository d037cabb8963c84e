"""Dominance, gap witnesses, witness verification, bounded determinization,
exact domination checking, the budgeted dual semi-decider, and the reduction
from NFA universality."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .augmented import StateBudgetExceeded
from .cactus import AugConfiguration, Calculus, Rejection, StableCycleCertificate
from .extword import AugState, Block, Cactus, ExtWord, Item, Jump, Power, iter_letters
from .tropical import INF, Weight, vector_mul, wmin
from .wfa import (
    AlphabetCollision,
    Nfa,
    Wfa,
    fresh_name,
    initial_configuration,
    Configuration,
    evaluate,
    next_conf,
)


class EmptyPool(ValueError):
    pass


class NoSeamlessBaseline(ValueError):
    pass


class NotDeterministic(ValueError):
    pass


# ------------------------------------------------------------------ dominance


@dataclass(frozen=True)
class Dominance:
    dominant: frozenset[AugState]
    value: Weight


def _support_step(calc: Calculus, item: Item, block: Block, states: frozenset[str]):
    tr = calc.transfer(item, block)
    if tr is None:
        return None, frozenset()
    rows = tr.matrix.rows
    out = set()
    for q in states:
        row = rows[block.index(q)]
        out.update(tr.dst.reach[j] for j, w in enumerate(row) if w is not INF)
    return tr.dst, frozenset(out)


def dominant_states(calc: Calculus, conf: AugConfiguration, pool: Iterable[Item]) -> Dominance:
    """States from which some pool suffix survives while every strictly lower state dies."""
    pool = list(pool)
    if not pool:
        raise EmptyPool("dominance needs a nonempty letter pool")
    if conf.is_dead:
        raise ValueError("configuration has empty support")
    block = conf.block
    finite = {q: v for q, v in zip(block.reach, conf.values) if v is not INF}
    dominant = set()
    for q, v in finite.items():
        lower = frozenset(p for p, u in finite.items() if u < v)
        start = (block, frozenset([q]), lower)
        seen = {start}
        queue = deque([start])
        found = False
        while queue and not found:
            b, r1, r2 = queue.popleft()
            if r1 and not r2:
                found = True
                break
            for item in pool:
                b2, n1 = _support_step(calc, item, b, r1)
                if b2 is None or not n1:
                    continue
                _, n2 = _support_step(calc, item, b, r2)
                nxt = (b2, n1, n2)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        if found:
            dominant.add(AugState(q, block.base, block.reach))
    value = max((finite[s.inner] for s in dominant), default=INF)
    return Dominance(frozenset(dominant), value)


def _seamless_configuration(calc: Calculus, word: ExtWord) -> AugConfiguration:
    if any(isinstance(x, Jump) for x in iter_letters(word)):
        raise NoSeamlessBaseline("word contains jump letters")
    conf = calc.initial_configuration()
    for item in word:
        conf = calc.ext_eval((item,), conf)
        if conf.is_dead or conf.value(conf.block.base) != 0:
            raise NoSeamlessBaseline("baseline run is not seamless")
    return conf


def potential(calc: Calculus, word: ExtWord, pool: Iterable[Item]) -> Weight:
    conf = _seamless_configuration(calc, word)
    return dominant_states(calc, conf, pool).value


def charge(calc: Calculus, word: ExtWord) -> Weight:
    conf = _seamless_configuration(calc, word)
    return -conf.minimum


def default_pool(calc: Calculus, extra: Iterable[Item] = (), block_budget: int = 10_000) -> list[Item]:
    """Base letters, jump letters of every reachable block, and the given extra letters."""
    pool: list[Item] = list(calc.aug.base_letters)
    for block in calc.aug.reachable_blocks(block_budget):
        pool += [Jump(block.base, p, block.reach) for p in block.reach if p != block.base]
    seen = set(pool)
    pool += [x for x in extra if x not in seen]
    return pool


# ------------------------------------------------------------ gap witnesses


@dataclass(frozen=True)
class GapWitness:
    x: tuple[str, ...]
    y: tuple[str, ...]
    q: str
    bound: int
    value_xy: Weight  # mwt(xy, q0 -> Q)
    value_xy_via_q: Weight  # mwt(xy, q0 -x-> q -y-> Q)
    value_x_q: Weight  # mwt(x, q0 -> q)
    value_x: Weight  # mwt(x, q0 -> Q)
    strict: bool

    @property
    def gap(self) -> int:
        return self.value_x_q - self.value_x


def _normalize(values: Sequence[Weight]) -> tuple[Weight, ...]:
    m = wmin(values)
    if m is INF:
        return tuple(values)
    return tuple(v if v is INF else v - m for v in values)


def validate_gap_witness(a: Wfa, w: GapWitness) -> bool:
    """Re-check both clauses by direct computation."""
    cx = next_conf(a, initial_configuration(a), w.x)
    vq = cx[w.q]
    if vq is INF or cx.minimum is INF or vq - cx.minimum <= w.bound:
        return False
    total = next_conf(a, cx, w.y).minimum
    only_q = next_conf(a, Configuration(cx.states, tuple(v if s == w.q else INF for s, v in zip(cx.states, cx.values))), w.y)
    return total is not INF and total == only_q.minimum


def gap_witness_search(a: Wfa, bound: int, max_x: int, max_y: int) -> GapWitness | None:
    """Shortlex-first witness, preferring ones where the route through q is strictly best."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    for strict in (True, False):
        found = _gap_search(a, bound, max_x, max_y, strict)
        if found is not None:
            if not validate_gap_witness(a, found):
                raise AssertionError("gap witness failed re-validation")
            return found
    return None


def _gap_search(a: Wfa, bound: int, max_x: int, max_y: int, strict: bool) -> GapWitness | None:
    mats = [(s, a.letter_matrix(s)) for s in a.alphabet]
    init = initial_configuration(a).values
    frontier = [((), init)]
    seen = {_normalize(init)}
    for length in range(max_x + 1):
        for x, conf in frontier:
            low = wmin(conf)
            for i, q in enumerate(a.states):
                v = conf[i]
                if v is INF or v - low <= bound:
                    continue
                y = _suffix_search(mats, conf, i, max_y, strict)
                if y is not None:
                    y, vxy = y
                    return GapWitness(x, y, q, bound, vxy, vxy, v, low, strict)
        if length == max_x:
            break
        nxt = []
        for x, conf in frontier:
            for s, m in mats:
                c2 = vector_mul(conf, m)
                key = _normalize(c2)
                if wmin(c2) is INF or key in seen:
                    continue
                seen.add(key)
                nxt.append((x + (s,), c2))
        frontier = nxt
    return None


def _suffix_search(mats, conf, qi: int, max_y: int, strict: bool):
    via_q = tuple(v if i == qi else INF for i, v in enumerate(conf))
    other = tuple(INF if i == qi else v for i, v in enumerate(conf))
    frontier = [((), via_q, other)]
    seen = set()
    for length in range(max_y + 1):
        nxt = []
        for y, vq, vo in frontier:
            mq, mo = wmin(vq), wmin(vo)
            if mq is not INF and (mq < mo if strict else mq <= mo):
                return y, mq
        if length == max_y:
            break
        for y, vq, vo in frontier:
            for s, m in mats:
                q2, o2 = vector_mul(vq, m), vector_mul(vo, m)
                if wmin(q2) is INF:
                    continue
                joint = _normalize(q2 + o2)
                if joint in seen:
                    continue
                seen.add(joint)
                nxt.append((y + (s,), q2, o2))
        frontier = nxt
    return None


# ------------------------------------------------------------------ witnesses


@dataclass(frozen=True)
class WitnessCandidate:
    w1: ExtWord
    w2: ExtWord
    w3: ExtWord
    type_rank: int | None = None  # bound on the rebase level of w1 and w2


@dataclass(frozen=True)
class WitnessVerdict:
    accepted: bool
    requirement: int | None = None  # first failing requirement (1-4)
    detail: str = ""
    certificate: StableCycleCertificate | None = field(default=None, compare=False)

    def report(self) -> str:
        if self.accepted:
            return "verdict: accepted"
        return f"verdict: rejected (requirement {self.requirement})\nevidence: {self.detail}"


def check_witness(calc: Calculus, cand: WitnessCandidate) -> WitnessVerdict:
    w1, w2, w3 = tuple(cand.w1), tuple(cand.w2), tuple(cand.w3)
    # (1) strata membership and a seamless baseline on w1 w2
    for name, w in (("w1", w1), ("w2", w2)):
        if any(isinstance(x, Jump) for x in iter_letters(w)):
            return WitnessVerdict(False, 1, f"{name} contains a jump letter")
        if cand.type_rank is not None and calc.word_rank(w)[0] > cand.type_rank:
            return WitnessVerdict(False, 1, f"{name} exceeds rebase level {cand.type_rank}")
    try:
        _seamless_configuration(calc, w1 + w2)
    except NoSeamlessBaseline as exc:
        return WitnessVerdict(False, 1, str(exc))
    # (2) w2 is a stable cycle on the ghost closure after w1
    s1 = calc.block_after(w1)
    result = calc.check_stable_cycle(s1, w2)
    if isinstance(result, Rejection):
        return WitnessVerdict(False, 2, f"{result.reason}: {result.detail}")
    # (3) reading w2 keeps the reachable set
    c1 = calc.ext_eval(w1)
    c12 = calc.ext_eval(w2, c1)
    if c1.support != c12.support:
        return WitnessVerdict(False, 3, "w2 changes the reachable set", result)
    # (4) w3 survives after w2 but not after its cactus
    alive = calc.ext_eval(w3, c12)
    if alive.is_dead:
        return WitnessVerdict(False, 4, "no run on w1 w2 w3", result)
    killed = calc.ext_eval(w3, calc.ext_eval((Cactus(s1, w2),), c1))
    if not killed.is_dead:
        return WitnessVerdict(False, 4, "the cactus of w2 does not kill w3", result)
    return WitnessVerdict(True, None, "", result)


@dataclass(frozen=True)
class PumpedGap:
    """A gap witness of the augmented construction obtained by pumping a witness."""

    x: ExtWord
    y: ExtWord
    q: AugState
    gap: int
    value: Weight


def pumped_gap(calc: Calculus, cand: WitnessCandidate, repetitions: int) -> PumpedGap:
    """Gap witness with prefix ``w1 w2^(2 m_frak repetitions)`` and suffix ``w3``."""
    w1, w2, w3 = tuple(cand.w1), tuple(cand.w2), tuple(cand.w3)
    x = w1 + (Power(w2, 2 * calc.constants.m_frak * repetitions),)
    cx = calc.ext_eval(x)
    if cx.is_dead:
        raise ValueError("pumped prefix has no run")
    tr = calc.word_transfer(w3, cx.block)
    best_q, best = None, INF
    if tr is not None:
        for i, (q, v) in enumerate(zip(cx.block.reach, cx.values)):
            if v is INF:
                continue
            tail = wmin(tr.matrix.rows[i])
            if tail is not INF and (best is INF or v + tail < best):
                best_q, best = q, v + tail
    if best_q is None:
        raise ValueError("pumped word has no run")
    gap = cx.value(best_q) - cx.minimum
    return PumpedGap(x, w3, AugState(best_q, cx.block.base, cx.block.reach), gap, best)


def pumping_repetitions(calc: Calculus, cand: WitnessCandidate, gap: int) -> int:
    """Repetition count after which the pumped witness has gap above ``gap``."""
    s1 = calc.block_after(tuple(cand.w1))
    cert = calc.certify(s1, tuple(cand.w2))
    return calc.pumping_threshold(cert, gap + calc.maxeff(tuple(cand.w1)))


# ------------------------------------------------------- bounded determinizer


def _state_name(a: Wfa, values: Sequence[Weight]) -> str:
    return "{" + ",".join(f"{q}:{v}" for q, v in zip(a.states, values) if v is not INF) + "}"


def determinize_with_bound(a: Wfa, bound: int, state_cap: int = 10_000) -> Wfa:
    """Deterministic automaton over normalized configurations clipped above ``bound``."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    mats = [(s, a.letter_matrix(s)) for s in a.alphabet]
    start = initial_configuration(a).values
    names = {start: _state_name(a, start)}
    order = [start]
    weights = {}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for s, m in mats:
            raw = vector_mul(g, m)
            low = wmin(raw)
            if low is INF:
                continue
            nxt = tuple(INF if v is INF or v - low > bound else v - low for v in raw)
            if nxt not in names:
                if len(names) >= state_cap:
                    raise StateBudgetExceeded(f"more than {state_cap} states")
                names[nxt] = _state_name(a, nxt)
                order.append(nxt)
                queue.append(nxt)
            weights[(names[g], s, names[nxt])] = low
    return Wfa(tuple(names[g] for g in order), a.alphabet, names[start], weights)


# ---------------------------------------------------------- domination check


@dataclass(frozen=True)
class Counterexample:
    word: tuple[str, ...]
    a_value: Weight
    d_value: Weight


def check_runs_dominated(a: Wfa, d: Wfa) -> Counterexample | None:
    """None iff every run of ``a`` weighs at least ``d``'s value and ``d`` reads every word ``a`` reads."""
    if not d.is_deterministic():
        raise NotDeterministic("second automaton must be deterministic")
    start = (a.initial, d.initial)
    dist: dict[tuple[str, str], int] = {start: 0}
    words: dict[tuple[str, str], tuple[str, ...]] = {start: ()}
    while True:
        new_dist = dict(dist)
        new_words = dict(words)
        changed = False
        for (qa, qd), v in dist.items():
            w = words[(qa, qd)]
            for s in a.alphabet:
                succ_a = a.successors(qa, s)
                if not succ_a:
                    continue
                succ_d = d.successors(qd, s) if s in d.alphabet else ()
                if not succ_d:
                    return _counterexample(a, d, w + (s,))
                qd2, cd = succ_d[0]
                for qa2, ca in succ_a:
                    nv = v + ca - cd
                    key = (qa2, qd2)
                    if key not in new_dist or nv < new_dist[key]:
                        new_dist[key] = nv
                        new_words[key] = w + (s,)
                        changed = True
        dist, words = new_dist, new_words
        negative = [k for k, v in dist.items() if v < 0]
        if negative:
            best = min(negative, key=lambda k: (len(words[k]), words[k]))
            return _counterexample(a, d, words[best])
        if not changed:
            return None


def _counterexample(a: Wfa, d: Wfa, word: tuple[str, ...]) -> Counterexample:
    return Counterexample(word, evaluate(a, word), evaluate(d, word))


def equivalence_of_determinizer_output(a: Wfa, d: Wfa) -> Counterexample | None:
    """None means equivalent; valid for outputs of ``determinize_with_bound``."""
    return check_runs_dominated(a, d)


# ------------------------------------------------------------------- decide


@dataclass(frozen=True)
class Determinizable:
    automaton: Wfa
    bound: int
    round: int


@dataclass(frozen=True)
class Nondeterminizable:
    witness: WitnessCandidate
    round: int


@dataclass(frozen=True)
class Unknown:
    budget: int


DualVerdict = Determinizable | Nondeterminizable | Unknown


def _size(item: Item) -> int:
    if isinstance(item, Cactus):
        return 1 + sum(_size(x) for x in item.word)
    return 1


class _Enumerator:
    """Words of a given size over base letters, jumps and certified cacti."""

    def __init__(self, calc: Calculus):
        self.calc = calc
        self.pool: dict[Block, list[Cactus]] = {}
        self._grown: set[int] = set()

    def letters(self, block: Block, size: int, jumps: bool) -> Iterator[Item]:
        if size == 1:
            yield from self.calc.aug.applicable_letters(block)
            if jumps:
                for p in block.reach:
                    if p != block.base:
                        yield Jump(block.base, p, block.reach)
        for c in self.pool.get(block, ()):
            if _size(c) == size:
                yield c

    def words(self, block: Block, size: int, jumps: bool) -> Iterator[tuple[ExtWord, Block]]:
        if size == 0:
            yield (), block
            return
        for first in range(1, size + 1):
            for item in self.letters(block, first, jumps):
                tr = self.calc.transfer(item, block)
                if tr is None:
                    continue
                for rest, dst in self.words(tr.dst, size - first, jumps):
                    yield (item,) + rest, dst

    def grow(self, size: int, blocks: Iterable[Block]) -> None:
        """Register cacti whose inner word is a base word of ``size - 1`` letters."""
        if size in self._grown or size < 2:
            return
        self._grown.add(size)
        for block in blocks:
            for word, dst in self.words_base(block, size - 1):
                if dst != block:
                    continue
                if isinstance(self.calc.check_stable_cycle(block, word), Rejection):
                    continue
                self.pool.setdefault(block, []).append(Cactus(block, word))

    def words_base(self, block: Block, size: int) -> Iterator[tuple[ExtWord, Block]]:
        if size == 0:
            yield (), block
            return
        for item in self.calc.aug.applicable_letters(block):
            tr = self.calc.transfer(item, block)
            for rest, dst in self.words_base(tr.dst, size - 1):
                yield (item,) + rest, dst


def _witness_slice(calc: Calculus, enum: _Enumerator, size: int, blocks: list[Block]) -> WitnessCandidate | None:
    enum.grow(size, blocks)
    s0 = calc.initial_block
    for n1 in range(size):
        for n2 in range(1, size - n1 + 1):
            n3 = size - n1 - n2
            for w1, s1 in enum.words(s0, n1, False):
                try:
                    _seamless_configuration(calc, w1)
                except NoSeamlessBaseline:
                    continue
                for w2, dst in enum.words(s1, n2, False):
                    if dst != s1 or isinstance(calc.check_stable_cycle(s1, w2), Rejection):
                        continue
                    for w3, _ in enum.words(s1, n3, True):
                        cand = WitnessCandidate(w1, w2, w3)
                        if check_witness(calc, cand).accepted:
                            return cand
    return None


def decide(a: Wfa, budget: int, state_cap: int = 10_000, calc: Calculus | None = None) -> DualVerdict:
    """Alternate bounded determinization and witness enumeration for ``budget`` rounds."""
    calc = Calculus(a) if calc is None else calc
    enum = _Enumerator(calc)
    blocks: list[Block] | None = None
    for r in range(budget):
        try:
            d = determinize_with_bound(a, r, state_cap)
        except StateBudgetExceeded:
            d = None
        if d is not None and equivalence_of_determinizer_output(a, d) is None:
            return Determinizable(d, r, r)
        if blocks is None:
            blocks = calc.aug.reachable_blocks(state_cap)
        cand = _witness_slice(calc, enum, r, blocks)
        if cand is not None:
            m = pumping_repetitions(calc, cand, 1)
            if pumped_gap(calc, cand, m).gap <= 1:
                raise AssertionError("accepted witness failed pumping re-validation")
            return Nondeterminizable(cand, r)
    return Unknown(budget)


# ------------------------------------------------------------- NFA reduction


def complete_nfa(n: Nfa) -> Nfa:
    """Add a non-accepting sink so that every word has a run."""
    missing = [(p, s) for p in n.states for s in n.alphabet if not any(t[0] == p and t[1] == s for t in n.transitions)]
    if not missing:
        return n
    sink = fresh_name("sink", n.states)
    trans = set(n.transitions) | {(p, s, sink) for p, s in missing} | {(sink, s, sink) for s in n.alphabet}
    return Nfa(n.states + (sink,), n.alphabet, n.initial, n.accepting, frozenset(trans))


def nfa_to_wfa_reduction(n: Nfa) -> Wfa:
    for letter in ("#", "a", "b"):
        if letter in n.alphabet:
            raise AlphabetCollision(f"letter {letter!r} already in the alphabet")
    n = complete_nfa(n)
    qa = fresh_name("q_a", n.states)
    qb = fresh_name("q_b", list(n.states) + [qa])
    qt = fresh_name("q_top", list(n.states) + [qa, qb])
    weights = {t: 0 for t in n.transitions}
    for p in n.states:
        if p in n.accepting:
            weights[(p, "#", qt)] = 0
        else:
            weights[(p, "#", qa)] = 0
            weights[(p, "#", qb)] = 0
    weights.update(
        {
            (qa, "a", qa): 0,
            (qa, "b", qa): 1,
            (qb, "a", qb): 1,
            (qb, "b", qb): 0,
            (qt, "a", qt): 0,
            (qt, "b", qt): 0,
        }
    )
    return Wfa(n.states + (qa, qb, qt), n.alphabet + ("#", "a", "b"), n.initial, weights)

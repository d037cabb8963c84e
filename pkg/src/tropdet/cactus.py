"""Stable cycles, pair classification, and the semantics of extended letters.

All repetition counts of the form ``w^m`` with ``m`` a stabilization constant
are evaluated by binary powering of block matrices, so the exponents may be
arbitrarily large Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

from .augmented import AugWfa, Transfer, augmented_size, jump_transfer
from .extword import (
    AugState,
    Base,
    Block,
    Cactus,
    ExtWord,
    Item,
    Jump,
    Letter,
    MalformedLetter,
    Power,
    Rebase,
    iter_letters,
    substitute,
)
from .tropical import (
    INF,
    BoolMatrix,
    IdempotentProfile,
    MinPlusMatrix,
    Weight,
    detect_negative_cycle,
    idempotent_profile,
    johnson_reweight,
    minplus_mul,
    minplus_pow,
    vector_mul,
    wmin,
)
from .wfa import InvalidRun, Wfa

# a Power node whose body leaves its block is unrolled only up to this many copies
MAX_UNROLLED_POWER = 10_000


class NotStableCycle(ValueError):
    def __init__(self, rejection: "Rejection"):
        super().__init__(f"{rejection.reason}: {rejection.detail}")
        self.rejection = rejection


class RebasePairNotGrounded(ValueError):
    pass


class FTooSmall(ValueError):
    pass


class NotDegenerate(ValueError):
    pass


class JumpInWord(ValueError):
    pass


@dataclass(frozen=True)
class StabilizationConstants:
    size_s: int
    n_frak: int
    m_frak: int


def stabilization_constants(size_s: int) -> StabilizationConstants:
    if size_s < 1:
        raise ValueError("state-space size must be positive")
    n = factorial(size_s)
    return StabilizationConstants(size_s, n, size_s * n)


@dataclass(frozen=True)
class AugConfiguration:
    """Minimal weights over one block; ``block is None`` means every entry is INF."""

    block: Block | None
    values: tuple[Weight, ...] = ()

    @classmethod
    def dead(cls) -> "AugConfiguration":
        return cls(None, ())

    @property
    def is_dead(self) -> bool:
        return self.block is None

    def __getitem__(self, state: AugState) -> Weight:
        if self.block is None or state.block != self.block:
            return INF
        return self.values[self.block.index(state.inner)]

    def value(self, inner: str) -> Weight:
        if self.block is None or inner not in self.block.reach:
            return INF
        return self.values[self.block.index(inner)]

    @property
    def support(self) -> frozenset[AugState]:
        if self.block is None:
            return frozenset()
        return frozenset(s for s, v in zip(self.block.states(), self.values) if v is not INF)

    @property
    def minimum(self) -> Weight:
        return wmin(self.values)

    def items(self) -> list[tuple[AugState, Weight]]:
        if self.block is None:
            return []
        return list(zip(self.block.states(), self.values))


def _normalize_conf(block: Block | None, values: tuple[Weight, ...]) -> AugConfiguration:
    if block is None or all(v is INF for v in values):
        return AugConfiguration.dead()
    return AugConfiguration(block, values)


@dataclass(frozen=True)
class Rejection:
    reason: str  # NotReflexive | NegativeCycle | BaselineNotZero
    detail: str = ""


@dataclass(frozen=True)
class PairTables:
    """Classification of a block's inner states under one power of a cycle."""

    ref_states: frozenset[str]
    min_states: frozenset[str]
    tethered: frozenset[tuple[str, str]]
    plateau: frozenset[tuple[str, str]]
    grounded: frozenset[tuple[str, str]]
    grounding: dict = field(compare=False)


def pair_tables(block: Block, power: MinPlusMatrix) -> PairTables:
    """Tables read off a stabilized power matrix of a cycle on ``block``."""
    names = block.reach
    n = len(names)
    rows = power.rows
    ref = frozenset(names[i] for i in range(n) if rows[i][i] is not INF)
    mins = [i for i in range(n) if rows[i][i] == 0]
    tth, plt, grn = set(), set(), set()
    grounding = {}
    for i in range(n):
        for j in range(n):
            if rows[i][j] is INF:
                continue
            if rows[i][i] == 0:
                tth.add((names[i], names[j]))
            if rows[j][j] == 0:
                plt.add((names[i], names[j]))
    for i in range(n):
        for j in range(n):
            best_g, best = None, INF
            for g in mins:
                x, y = rows[i][g], rows[g][j]
                if x is INF or y is INF:
                    continue
                if best is INF or x + y < best:
                    best, best_g = x + y, g
            if best_g is not None:
                grn.add((names[i], names[j]))
                grounding[(names[i], names[j])] = (names[best_g], best)
    return PairTables(ref, frozenset(names[i] for i in mins), frozenset(tth), frozenset(plt), frozenset(grn), grounding)


@dataclass(frozen=True)
class StableCycleCertificate:
    block: Block
    word: ExtWord
    matrix: MinPlusMatrix
    profile: IdempotentProfile
    constants: StabilizationConstants
    stable_power: MinPlusMatrix
    tables: PairTables
    cactus: MinPlusMatrix

    @property
    def baseline(self) -> AugState:
        return AugState(self.block.base, self.block.base, self.block.reach)

    def report(self) -> str:
        t = self.tables
        names = self.block.reach

        def states(xs):
            return " ".join(q for q in names if q in xs) or "-"

        def pairs(xs):
            return " ".join(f"{s}->{r}" for s in names for r in names if (s, r) in xs) or "-"

        lines = [
            f"block: {self.block}",
            f"baseline: {self.baseline}",
            f"idempotent: index {self.profile.index} period {self.profile.period}",
            f"RefStates: {states(t.ref_states)}",
            f"MinStates: {states(t.min_states)}",
            f"TthPairs: {pairs(t.tethered)}",
            f"PltPairs: {pairs(t.plateau)}",
            f"GrnPairs: {pairs(t.grounded)}",
            "grounding:",
        ]
        for s in names:
            for r in names:
                if (s, r) in t.grounding:
                    g, w = t.grounding[(s, r)]
                    lines.append(f"  {s}->{r} via {g} weight {w}")
        return "\n".join(lines)


def classify_pairs(cert: StableCycleCertificate) -> PairTables:
    return cert.tables


@dataclass(frozen=True)
class MinGraph:
    vertices: tuple[str, ...]
    edges: BoolMatrix

    def has_edge(self, s: str, r: str) -> bool:
        return self.edges[self.vertices.index(s), self.vertices.index(r)]


@dataclass(frozen=True)
class Degeneracy:
    degenerate: bool
    witness: tuple[str, str] | None = None  # (s, t) with t reflexive, reachable, not grounded


class Calculus:
    """Semantics of extended words over one automaton, with memoized certificates.

    ``size_s`` overrides the state-space size used for the stabilization
    constants; by default it is the size of the whole augmented state space.
    """

    def __init__(self, a: Wfa, size_s: int | None = None):
        self.wfa = a
        self.aug = AugWfa(a)
        self.size_s = augmented_size(len(a.states)) if size_s is None else size_s
        self.constants = stabilization_constants(self.size_s)
        self._certs: dict[tuple[Block, ExtWord], StableCycleCertificate | Rejection] = {}
        self._transfers: dict[tuple[ExtWord, Block], Transfer | None] = {}
        self._maxeff: dict[Item, int] = {}
        self._ranks: dict[Item, tuple[int, int]] = {}

    # ------------------------------------------------------------ letters

    @property
    def initial_block(self) -> Block:
        return self.aug.initial_block

    def transfer(self, item: Item, block: Block) -> Transfer | None:
        if isinstance(item, Base):
            return self.aug.base_transfer(block, item)
        if isinstance(item, Cactus):
            if block != item.block:
                return None
            return Transfer(block, self.cactus_matrix(item))
        if isinstance(item, Rebase):
            if block.base != item.src or block.reach != item.block.reach:
                return None
            return Transfer(Block(item.dst, block.reach), self.rebase_matrix(item))
        if isinstance(item, Jump):
            if block.base != item.src or block.reach != item.reach:
                return None
            return jump_transfer(block, item.dst)
        if isinstance(item, Power):
            return self._power_transfer(item, block)
        raise MalformedLetter(f"unknown item {item!r}")

    def _power_transfer(self, item: Power, block: Block) -> Transfer | None:
        if item.exponent == 0:
            return Transfer(block, MinPlusMatrix.identity(len(block.reach)))
        body = self.word_transfer(item.word, block)
        if body is None:
            return None
        if body.dst == block:
            return Transfer(block, minplus_pow(body.matrix, item.exponent))
        if item.exponent > MAX_UNROLLED_POWER:
            raise MalformedLetter("repeated word does not return to its block")
        acc: Transfer | None = body
        for _ in range(item.exponent - 1):
            nxt = self.word_transfer(item.word, acc.dst)
            if nxt is None:
                return None
            acc = Transfer(nxt.dst, minplus_mul(acc.matrix, nxt.matrix))
        return acc

    def word_transfer(self, word: ExtWord, block: Block) -> Transfer | None:
        key = (word, block)
        if key in self._transfers:
            return self._transfers[key]
        acc = Transfer(block, MinPlusMatrix.identity(len(block.reach)))
        for item in word:
            tr = self.transfer(item, acc.dst)
            if tr is None:
                acc = None
                break
            acc = Transfer(tr.dst, minplus_mul(acc.matrix, tr.matrix))
        self._transfers[key] = acc
        return acc

    def block_after(self, word: ExtWord, block: Block | None = None) -> Block | None:
        """The deterministic block reached by ``word`` (its ghost closure), if the word applies."""
        cur = self.initial_block if block is None else block
        for item in word:
            tr = self.transfer(item, cur)
            if tr is None:
                return None
            cur = tr.dst
        return cur

    def initial_configuration(self) -> AugConfiguration:
        return AugConfiguration(self.initial_block, (0,))

    def ext_eval(self, word: ExtWord, conf: AugConfiguration | None = None) -> AugConfiguration:
        conf = self.initial_configuration() if conf is None else conf
        if conf.is_dead:
            return conf
        tr = self.word_transfer(tuple(word), conf.block)
        if tr is None:
            return AugConfiguration.dead()
        return _normalize_conf(tr.dst, vector_mul(conf.values, tr.matrix))

    def ext_matrix(self, item: Item, block: Block) -> MinPlusMatrix | None:
        tr = self.transfer(item, block)
        return None if tr is None else tr.matrix

    # ------------------------------------------------------- stable cycles

    def check_stable_cycle(self, block: Block, word: ExtWord) -> StableCycleCertificate | Rejection:
        key = (block, tuple(word))
        if key not in self._certs:
            self._certs[key] = self._certify(block, tuple(word))
        return self._certs[key]

    def certify(self, block: Block, word: ExtWord) -> StableCycleCertificate:
        result = self.check_stable_cycle(block, word)
        if isinstance(result, Rejection):
            raise NotStableCycle(result)
        return result

    def _certify(self, block: Block, word: ExtWord) -> StableCycleCertificate | Rejection:
        tr = self.word_transfer(word, block)
        if tr is None or tr.dst != block:
            return Rejection("NotReflexive", "the word does not map the block back to itself")
        m = tr.matrix
        cycle = detect_negative_cycle(m)
        if cycle is not None:
            return Rejection("NegativeCycle", " -> ".join(block.reach[i] for i in cycle))
        b = block.index(block.base)
        if m.rows[b][b] != 0:
            return Rejection("BaselineNotZero", f"baseline self-weight is {m.rows[b][b]}")
        power = minplus_pow(m, self.constants.m_frak)
        tables = pair_tables(block, power)
        n = len(block.reach)
        rows = [[INF] * n for _ in range(n)]
        for (s, r), (_, w) in tables.grounding.items():
            rows[block.index(s)][block.index(r)] = w
        return StableCycleCertificate(
            block,
            word,
            m,
            idempotent_profile(m.support()),
            self.constants,
            power,
            tables,
            MinPlusMatrix.from_rows(rows, n),
        )

    def cactus_matrix(self, letter: Cactus) -> MinPlusMatrix:
        return self.certify(letter.block, letter.word).cactus

    def rebase_matrix(self, letter: Rebase) -> MinPlusMatrix:
        block = letter.block
        if letter.src not in block.reach or letter.dst not in block.reach:
            raise MalformedLetter("rebase endpoints outside the block")
        cert = self.certify(block, letter.word)
        if (letter.src, letter.dst) not in cert.tables.grounded:
            raise RebasePairNotGrounded(f"({letter.src}, {letter.dst}) is not grounded")
        c = cert.cactus.rows[block.index(letter.src)][block.index(letter.dst)]
        return MinPlusMatrix.from_rows(
            [[x if x is INF else x - c for x in row] for row in cert.cactus.rows], len(block.reach)
        )

    # ---------------------------------------------------------- effect bounds

    def letter_maxeff(self, item: Item) -> int:
        if item in self._maxeff:
            return self._maxeff[item]
        if isinstance(item, Base):
            v = self.aug.letter_wmax(item)
        elif isinstance(item, Cactus):
            v = self.cactus_matrix(item).max_abs()
        elif isinstance(item, Rebase):
            v = self.rebase_matrix(item).max_abs()
        elif isinstance(item, Jump):
            v = 0
        elif isinstance(item, Power):
            v = item.exponent * self.maxeff(item.word)
        else:
            raise MalformedLetter(f"unknown item {item!r}")
        self._maxeff[item] = v
        return v

    def maxeff(self, word: ExtWord) -> int:
        return sum(self.letter_maxeff(x) for x in word)

    # ------------------------------------------------------------- pumping

    def pumping_threshold(self, cert: StableCycleCertificate, n: int) -> int:
        """A repetition count M0 such that for every m >= M0 the word repeated 2*m_frak*m times
        weighs more than ``n`` on non-grounded pairs and equals the cactus entry on grounded ones."""
        h = johnson_reweight(cert.stable_power)
        spread = max((abs(x) for x in h), default=0)
        g_max = max((w for _, w in cert.tables.grounding.values()), default=0)
        return self.size_s * (2 * spread + max(n, g_max, 0) + 1)

    def unfold(self, x: ExtWord, alpha: Cactus, y: ExtWord, f: int) -> ExtWord:
        word = tuple(x) + (alpha,) + tuple(y)
        if f <= 2 * self.maxeff(word):
            raise FTooSmall(f"F={f} must exceed twice the maximal effect {self.maxeff(word)}")
        cert = self.certify(alpha.block, alpha.word)
        m0 = self.pumping_threshold(cert, f)
        return tuple(x) + (Power(alpha.word, 2 * self.constants.m_frak * m0),) + tuple(y)

    def rebase_remove(self, x: ExtWord, beta: Rebase, y: ExtWord) -> ExtWord:
        self.rebase_matrix(beta)
        return tuple(x) + _rebase_expansion(beta) + tuple(y)

    def rank(self, item: Item) -> tuple[int, int]:
        """Position in the cactus strata: (rebase level, stabilization depth within it)."""
        if item in self._ranks:
            return self._ranks[item]
        if isinstance(item, (Base, Jump)):
            r = (0, 0)
        elif isinstance(item, Power):
            r = self.word_rank(item.word)
        elif isinstance(item, Cactus):
            j, k = self.word_rank(item.word)
            r = (j, k + 1)
        elif isinstance(item, Rebase):
            j, _ = self.word_rank(item.word)
            r = (j + 1, 0)
        else:
            raise MalformedLetter(f"unknown item {item!r}")
        self._ranks[item] = r
        return r

    def word_rank(self, word: ExtWord) -> tuple[int, int]:
        return max((self.rank(x) for x in word), default=(0, 0))

    def flatten(self, u: ExtWord, f: int) -> ExtWord:
        """Replace every cactus and rebase letter by concrete repetitions, deepest first."""
        u = tuple(u)
        if f <= 2 * self.maxeff(u):
            raise FTooSmall(f"F={f} must exceed twice the maximal effect {self.maxeff(u)}")
        while True:
            target = self._deepest_letter(u)
            if target is None:
                return u
            if isinstance(target, Rebase):
                self.rebase_matrix(target)
                u = substitute(u, target, _rebase_expansion(target))
                continue
            g = f + 2 * self.maxeff(u)
            cert = self.certify(target.block, target.word)
            m0 = self.pumping_threshold(cert, g)
            u = substitute(u, target, (Power(target.word, 2 * self.constants.m_frak * m0),))
            f = max(g, 2 * self.maxeff(u) + 1)

    def _deepest_letter(self, u: ExtWord) -> Cactus | Rebase | None:
        best, best_rank = None, (0, 0)
        for item in iter_letters(u):
            if isinstance(item, (Cactus, Rebase)):
                r = self.rank(item)
                if best is None or r > best_rank:
                    best, best_rank = item, r
        return best

    # ------------------------------------------------------------ degeneracy

    def min_graph(self, cert: StableCycleCertificate) -> MinGraph:
        verts = tuple(q for q in cert.block.reach if q in cert.tables.min_states)
        rows = [[(s, r) in cert.tables.grounded for r in verts] for s in verts]
        return MinGraph(verts, BoolMatrix.from_lists(rows) if verts else BoolMatrix.zero(0, 0))

    def degeneracy_check(self, cert: StableCycleCertificate) -> Degeneracy:
        reach = cert.stable_power.support()
        names = cert.block.reach
        for i, s in enumerate(names):
            for j, t in enumerate(names):
                if reach[i, j] and t in cert.tables.ref_states and (s, t) not in cert.tables.grounded:
                    return Degeneracy(False, (s, t))
        return Degeneracy(True)

    def degenerate_replacement(self, cert: StableCycleCertificate, limit: int = 100_000) -> int:
        """Least m such that the cycle repeated 2*m_frak*|S|*m times behaves like its cactus."""
        if not self.degeneracy_check(cert).degenerate:
            raise NotDegenerate("the stable cycle is not degenerate")
        stride = minplus_pow(cert.matrix, 2 * self.constants.m_frak * self.size_s)
        cur = stride
        seen = set()
        for m in range(1, limit + 1):
            if cur == cert.cactus:
                return m
            if cur in seen:
                break
            seen.add(cur)
            cur = minplus_mul(cur, stride)
        raise RuntimeError("no repetition matched the cactus behaviour")

    # ------------------------------------------------------------------ runs

    def run_weights(self, word: ExtWord, block: Block, inner: Sequence[str]) -> list[int]:
        """Step weights of the run through inner states ``inner`` on a letter word."""
        if len(inner) != len(word) + 1:
            raise InvalidRun("inner state sequence must have |word| + 1 entries")
        out = []
        cur = block
        if inner[0] not in cur.reach:
            raise InvalidRun("run starts outside the block")
        for item, q1, q2 in zip(word, inner, inner[1:]):
            tr = self.transfer(item, cur)
            if tr is None or q2 not in tr.dst.reach:
                raise InvalidRun(f"letter not applicable at step {len(out) + 1}")
            w = tr.matrix.rows[cur.index(q1)][tr.dst.index(q2)]
            if w is INF:
                raise InvalidRun(f"no move {q1} -> {q2} at step {len(out) + 1}")
            out.append(w)
            cur = tr.dst
        return out

    def baseline_inner(self, word: ExtWord, block: Block | None = None) -> list[str]:
        """Inner states of the baseline run (the sequence of baselines)."""
        cur = self.initial_block if block is None else block
        out = [cur.base]
        for item in word:
            tr = self.transfer(item, cur)
            if tr is None:
                raise InvalidRun("word not applicable")
            cur = tr.dst
            out.append(cur.base)
        return out

    def baseline_shift(self, word: ExtWord, inner: Sequence[str], block: Block | None = None) -> ExtWord:
        """Re-base ``word`` along the run through ``inner`` so that run becomes the baseline."""
        block = self.initial_block if block is None else block
        if any(isinstance(x, Jump) for x in word):
            raise JumpInWord("baseline shift is undefined on words with jump letters")
        if any(isinstance(x, Power) for x in word):
            raise MalformedLetter("baseline shift expects a word of letters")
        self.run_weights(word, block, inner)
        out: list[Letter] = []
        cur = block
        for item, q1, q2 in zip(word, inner, inner[1:]):
            tr = self.transfer(item, cur)
            if isinstance(item, Base):
                out.append(Base(q1, item.letter, self.wfa.weight(q1, item.letter, q2), q2))
            else:
                home = item.block
                if q1 == q2 == home.base:
                    out.append(Cactus(home, item.word))
                else:
                    out.append(Rebase(home, item.word, q1, q2))
            cur = tr.dst
        return tuple(out)


def _rebase_expansion(beta: Rebase) -> ExtWord:
    reach = beta.block.reach
    return (
        Jump(beta.src, beta.block.base, reach),
        Cactus(beta.block, beta.word),
        Jump(beta.block.base, beta.dst, reach),
    )

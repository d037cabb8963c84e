"""The baseline-augmented subset construction and run shifts.

A state of the construction is ``(inner, base, reach)``. Reading a base
letter, i.e. a transition ``(p, sigma, c, q)`` of the underlying automaton,
moves the baseline along that transition, updates the reach set by boolean
reachability, and charges ``c' - c`` to the inner move that used weight
``c'``. Since base and reach evolve deterministically, every configuration
lives in a single block and is stored as a vector over the block's reach.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import comb
from typing import Iterable

from .extword import AugState, Base, Block, make_block
from .tropical import INF, MinPlusMatrix, Weight
from .wfa import InvalidRun, Run, Transition, Wfa


class MixedBlocks(ValueError):
    pass


class TargetNotInReach(ValueError):
    pass


class StateBudgetExceeded(RuntimeError):
    pass


def augmented_size(n: int) -> int:
    """Number of triples (q, p, T) with q, p in T over n states."""
    return sum(comb(n, k) * k * k for k in range(1, n + 1))


@dataclass(frozen=True)
class Transfer:
    """Effect of a letter or word on one block: the target block and the weight matrix."""

    dst: Block
    matrix: MinPlusMatrix


@dataclass(frozen=True)
class AugTransition:
    src: AugState
    letter: Base
    weight: int
    dst: AugState


@dataclass(frozen=True)
class AugRun:
    start: AugState
    transitions: tuple[AugTransition, ...] = ()

    @property
    def weight(self) -> int:
        return sum(t.weight for t in self.transitions)

    def prefix_weights(self) -> tuple[int, ...]:
        out = [0]
        for t in self.transitions:
            out.append(out[-1] + t.weight)
        return tuple(out)


_MISSING = object()


class AugWfa:
    """Lazy realization of the augmented construction over ``underlying``."""

    def __init__(self, underlying: Wfa):
        self.wfa = underlying
        self._base_cache: dict[tuple[Block, Base], Transfer | None] = {}
        self.base_letters: tuple[Base, ...] = tuple(Base(p, s, c, q) for p, s, c, q in underlying.transitions())

    @property
    def initial_block(self) -> Block:
        return Block(self.wfa.initial, (self.wfa.initial,))

    @property
    def initial_state(self) -> AugState:
        q0 = self.wfa.initial
        return AugState(q0, q0, (q0,))

    def letter_wmax(self, letter: Base) -> int:
        """Largest |c' - c| over all inner moves on the letter's symbol."""
        return max(
            (abs(c2 - letter.weight) for (_, s, _), c2 in self.wfa.weights.items() if s == letter.letter),
            default=0,
        )

    def base_transfer(self, block: Block, letter: Base) -> Transfer | None:
        key = (block, letter)
        cached = self._base_cache.get(key, _MISSING)
        if cached is not _MISSING:
            return cached
        result = None
        if letter.src == block.base and self.wfa.weight(letter.src, letter.letter, letter.dst) == letter.weight:
            a = self.wfa
            reach2 = {q for p in block.reach for q, _ in a.successors(p, letter.letter)}
            dst = make_block(a, letter.dst, reach2)
            rows = []
            for q1 in block.reach:
                row: list[Weight] = [INF] * len(dst.reach)
                for q2, c2 in a.successors(q1, letter.letter):
                    row[dst.index(q2)] = c2 - letter.weight
                rows.append(row)
            result = Transfer(dst, MinPlusMatrix.from_rows(rows, len(dst.reach)))
        self._base_cache[key] = result
        return result

    def transitions(self, state: AugState, letter: Base) -> list[tuple[AugState, int]]:
        tr = self.base_transfer(state.block, letter)
        if tr is None:
            return []
        row = tr.matrix.rows[state.block.index(state.inner)]
        return [(AugState(q, tr.dst.base, tr.dst.reach), w) for q, w in zip(tr.dst.reach, row) if w is not INF]

    def applicable_letters(self, block: Block) -> list[Base]:
        return [t for t in self.base_letters if t.src == block.base]

    def reachable_blocks(self, budget: int | None = None) -> list[Block]:
        """Blocks reachable from the initial block, breadth-first."""
        start = self.initial_block
        seen = {start}
        order = [start]
        queue = deque([start])
        while queue:
            block = queue.popleft()
            for letter in self.applicable_letters(block):
                tr = self.base_transfer(block, letter)
                if tr is not None and tr.dst not in seen:
                    seen.add(tr.dst)
                    order.append(tr.dst)
                    if budget is not None and len(order) > budget:
                        raise StateBudgetExceeded(f"more than {budget} blocks")
                    queue.append(tr.dst)
        return order

    def states(self, budget: int | None = None) -> list[AugState]:
        return [s for b in self.reachable_blocks(budget) for s in b.states()]


def build_augmented(a: Wfa) -> AugWfa:
    return AugWfa(a)


# ------------------------------------------------------------------ run shifts


def shift_run_to_aug(aug: AugWfa, rho: Run, rho_base: Run, reach: Iterable[str] | None = None) -> AugRun:
    """The run of the construction over the letters of ``rho_base`` that shadows ``rho``."""
    a = aug.wfa
    if rho.word != rho_base.word:
        raise InvalidRun("runs read different words")
    reach = {a.initial} if reach is None else set(reach)
    block = make_block(a, rho_base.start, reach | {rho_base.start})
    if rho.start not in block.reach:
        raise InvalidRun("shifted run starts outside the reach set")
    state = start = AugState(rho.start, block.base, block.reach)
    out = []
    for t, tb in zip(rho.transitions, rho_base.transitions):
        letter = Base(tb.src, tb.letter, tb.weight, tb.dst)
        tr = aug.base_transfer(block, letter)
        if tr is None or t.src != state.inner:
            raise InvalidRun("baseline run is not a run of the automaton")
        w = tr.matrix.rows[block.index(t.src)][tr.dst.index(t.dst)] if t.dst in tr.dst.reach else INF
        if w is INF or w != t.weight - tb.weight:
            raise InvalidRun(f"no transition for {t}")
        nxt = AugState(t.dst, tr.dst.base, tr.dst.reach)
        out.append(AugTransition(state, letter, w, nxt))
        state, block = nxt, tr.dst
    return AugRun(start, tuple(out))


def shift_run_from_aug(aug: AugWfa, run: AugRun) -> Run:
    """Project to inner states and restore weights ``d_i + c_i``."""
    a = aug.wfa
    state = run.start
    trans = []
    for t in run.transitions:
        if t.src != state:
            raise InvalidRun("augmented run is not connected")
        src_block = t.src.block
        tr = aug.base_transfer(src_block, t.letter)
        if (
            tr is None
            or (t.dst.base, t.dst.reach) != (tr.dst.base, tr.dst.reach)
            or tr.matrix.rows[src_block.index(t.src.inner)][tr.dst.index(t.dst.inner)] != t.weight
        ):
            raise InvalidRun(f"no augmented transition {t}")
        c = t.weight + t.letter.weight
        if a.weight(t.src.inner, t.letter.letter, t.dst.inner) != c:
            raise InvalidRun("inner move is not a transition of the automaton")
        trans.append(Transition(t.src.inner, t.letter.letter, c, t.dst.inner))
        state = t.dst
    return Run(run.start.inner, tuple(trans))


def baseline_run_of(run: AugRun) -> Run:
    """The run of the automaton spelled by the letters of an augmented run."""
    trans = tuple(Transition(t.letter.src, t.letter.letter, t.letter.weight, t.letter.dst) for t in run.transitions)
    return Run(run.start.base, trans)


# ------------------------------------------------------------ ghosts and jumps


def ghost_closure(states: Iterable[AugState]) -> frozenset[AugState]:
    states = list(states)
    if not states:
        return frozenset()
    block = states[0].block
    if any(s.block != block for s in states):
        raise MixedBlocks("states do not share baseline and reach")
    return frozenset(block.states())


def jump_transfer(src: Block, dst_base: str) -> Transfer:
    """The zero-weight baseline move from ``src`` to ``(dst_base, reach)``."""
    if dst_base not in src.reach:
        raise TargetNotInReach(f"{dst_base!r} not in {src.reach}")
    return Transfer(Block(dst_base, src.reach), MinPlusMatrix.identity(len(src.reach)))


def jump_matrix(src: Block, dst: Block) -> MinPlusMatrix:
    if src.reach != dst.reach or dst.base not in src.reach:
        raise TargetNotInReach(f"{dst.base!r} not reachable by a jump from {src}")
    return jump_transfer(src, dst.base).matrix

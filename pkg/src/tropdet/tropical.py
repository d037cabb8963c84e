"""Exact min-plus and Boolean matrix algebra.

Weights are Python ints (unbounded) or the ``INF`` sentinel. Matrices are
immutable and may be rectangular so that block-to-block transfers of the
augmented construction can be expressed directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union


class Infinity:
    """The absorbing element of the min-plus semiring."""

    _instance: "Infinity | None" = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other: object) -> "Infinity":
        if isinstance(other, (int, Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: object) -> "Infinity":
        if isinstance(other, int):
            return self
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, (int, Infinity)):
            return False
        return NotImplemented

    def __le__(self, other: object) -> bool:
        if isinstance(other, (int, Infinity)):
            return other is self
        return NotImplemented

    def __gt__(self, other: object) -> bool:
        if isinstance(other, (int, Infinity)):
            return other is not self
        return NotImplemented

    def __ge__(self, other: object) -> bool:
        if isinstance(other, (int, Infinity)):
            return True
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("tropdet.INF")

    def __repr__(self) -> str:
        return "inf"

    __str__ = __repr__

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()
Weight = Union[int, Infinity]


def is_finite(x: Weight) -> bool:
    return x is not INF


def wmin(values: Iterable[Weight]) -> Weight:
    best: Weight = INF
    for v in values:
        if v is not INF and (best is INF or v < best):
            best = v
    return best


def parse_weight(token: str) -> Weight:
    if token == "inf":
        return INF
    return int(token)


class DimensionMismatch(ValueError):
    pass


class NegativeCycleError(ValueError):
    def __init__(self, cycle: tuple[int, ...]):
        super().__init__(f"negative cycle through {cycle}")
        self.cycle = cycle


@dataclass(frozen=True)
class MinPlusMatrix:
    rows: tuple[tuple[Weight, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Weight]], ncols: int | None = None) -> "MinPlusMatrix":
        frozen = tuple(tuple(r) for r in rows)
        width = ncols if ncols is not None else (len(frozen[0]) if frozen else 0)
        if any(len(r) != width for r in frozen):
            raise DimensionMismatch("ragged rows")
        return cls(frozen, width)

    @classmethod
    def identity(cls, n: int) -> "MinPlusMatrix":
        return cls(tuple(tuple(0 if i == j else INF for j in range(n)) for i in range(n)), n)

    @classmethod
    def infinite(cls, nrows: int, ncols: int) -> "MinPlusMatrix":
        return cls(tuple((INF,) * ncols for _ in range(nrows)), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        if self.nrows != self.ncols:
            raise DimensionMismatch("matrix is not square")
        return self.nrows

    def __getitem__(self, ij: tuple[int, int]) -> Weight:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "MinPlusMatrix") -> "MinPlusMatrix":
        return minplus_mul(self, other)

    def support(self) -> "BoolMatrix":
        return BoolMatrix(
            tuple(sum(1 << j for j, x in enumerate(row) if x is not INF) for row in self.rows),
            self.ncols,
        )

    def max_abs(self) -> int:
        return max((abs(x) for row in self.rows for x in row if x is not INF), default=0)

    def is_all_infinite(self) -> bool:
        return all(x is INF for row in self.rows for x in row)


def minplus_mul(a: MinPlusMatrix, b: MinPlusMatrix) -> MinPlusMatrix:
    if a.ncols != b.nrows:
        raise DimensionMismatch(f"{a.nrows}x{a.ncols} times {b.nrows}x{b.ncols}")
    cols = list(zip(*b.rows)) if b.nrows else [()] * b.ncols
    out = []
    for row in a.rows:
        finite = [(k, x) for k, x in enumerate(row) if x is not INF]
        new_row = []
        for col in cols:
            best: Weight = INF
            for k, x in finite:
                y = col[k]
                if y is INF:
                    continue
                s = x + y
                if best is INF or s < best:
                    best = s
            new_row.append(best)
        out.append(tuple(new_row))
    return MinPlusMatrix(tuple(out), b.ncols)


def minplus_pow(m: MinPlusMatrix, e: int) -> MinPlusMatrix:
    if e < 0:
        raise ValueError("negative exponent")
    result = MinPlusMatrix.identity(m.dim)
    base = m
    while e:
        if e & 1:
            result = minplus_mul(result, base)
        e >>= 1
        if e:
            base = minplus_mul(base, base)
    return result


def vector_mul(vec: Sequence[Weight], m: MinPlusMatrix) -> tuple[Weight, ...]:
    """Row vector times matrix."""
    if len(vec) != m.nrows:
        raise DimensionMismatch("vector length does not match matrix rows")
    out: list[Weight] = [INF] * m.ncols
    for k, x in enumerate(vec):
        if x is INF:
            continue
        for j, y in enumerate(m.rows[k]):
            if y is INF:
                continue
            s = x + y
            cur = out[j]
            if cur is INF or s < cur:
                out[j] = s
    return tuple(out)


@dataclass(frozen=True)
class BoolMatrix:
    """Boolean matrix with each row stored as a bitmask over columns."""

    rows: tuple[int, ...]
    ncols: int

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[bool]]) -> "BoolMatrix":
        width = len(rows[0]) if rows else 0
        return cls(tuple(sum(1 << j for j, x in enumerate(r) if x) for r in rows), width)

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "BoolMatrix":
        return cls((0,) * nrows, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        if self.nrows != self.ncols:
            raise DimensionMismatch("matrix is not square")
        return self.nrows

    def __getitem__(self, ij: tuple[int, int]) -> bool:
        i, j = ij
        return bool(self.rows[i] >> j & 1)

    def __matmul__(self, other: "BoolMatrix") -> "BoolMatrix":
        return bool_mul(self, other)

    def to_lists(self) -> list[list[bool]]:
        return [[bool(r >> j & 1) for j in range(self.ncols)] for r in self.rows]


def bool_mul(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    if a.ncols != b.nrows:
        raise DimensionMismatch("boolean product dimension mismatch")
    out = []
    for r in a.rows:
        acc = 0
        k = 0
        while r:
            if r & 1:
                acc |= b.rows[k]
            r >>= 1
            k += 1
        out.append(acc)
    return BoolMatrix(tuple(out), b.ncols)


def bool_pow(b: BoolMatrix, e: int) -> BoolMatrix:
    if e < 0:
        raise ValueError("negative exponent")
    result = BoolMatrix.identity(b.dim)
    base = b
    while e:
        if e & 1:
            result = bool_mul(result, base)
        e >>= 1
        if e:
            base = bool_mul(base, base)
    return result


@dataclass(frozen=True)
class IdempotentProfile:
    index: int
    period: int
    idempotent: BoolMatrix


def idempotent_profile(b: BoolMatrix) -> IdempotentProfile:
    """Least (index, period) with B^index = B^(index+period) and the idempotent power."""
    b.dim
    seen: dict[BoolMatrix, int] = {}
    powers: list[BoolMatrix] = [BoolMatrix.identity(b.nrows)]
    cur = b
    k = 1
    while cur not in seen:
        seen[cur] = k
        powers.append(cur)
        cur = bool_mul(cur, b)
        k += 1
    index = seen[cur]
    period = k - index
    k_idem = index + (-index) % period
    return IdempotentProfile(index, period, powers[k_idem] if k_idem < len(powers) else bool_pow(b, k_idem))


def _bellman_ford(m: MinPlusMatrix, verts: list[int]):
    """Relaxation from a virtual source joined to every vertex with weight 0."""
    dist = {v: 0 for v in verts}
    pred: dict[int, int | None] = {v: None for v in verts}
    edges = [(u, v, m.rows[u][v]) for u in verts for v in verts if m.rows[u][v] is not INF]
    n = len(verts)
    for it in range(n):
        relaxed = None
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                pred[v] = u
                relaxed = v
        if relaxed is None:
            return dist, None
        if it == n - 1:
            return dist, (pred, relaxed)
    return dist, None


def _extract_cycle(pred: dict[int, int | None], start: int, n: int) -> tuple[int, ...]:
    v = start
    for _ in range(n):
        nxt = pred[v]
        if nxt is None:
            raise AssertionError("predecessor chain left the cycle")
        v = nxt
    back = [v]
    u = pred[v]
    while u != v:
        back.append(u)
        u = pred[u]
    cycle = back[::-1]
    i = cycle.index(min(cycle))
    cycle = cycle[i:] + cycle[:i]
    return tuple(cycle) + (cycle[0],)


def detect_negative_cycle(m: MinPlusMatrix, support: Iterable[int] | None = None) -> tuple[int, ...] | None:
    """A negative cycle (first vertex repeated at the end) within ``support``, or None."""
    verts = sorted(set(range(m.dim) if support is None else support))
    for v in verts:
        if not 0 <= v < m.dim:
            raise IndexError(f"support vertex {v} out of range")
    _, found = _bellman_ford(m, verts)
    if found is None:
        return None
    pred, relaxed = found
    return _extract_cycle(pred, relaxed, len(verts))


def johnson_reweight(m: MinPlusMatrix) -> tuple[int, ...]:
    """Potentials h with h[p] + m[p,q] - h[q] >= 0 on every finite edge."""
    verts = list(range(m.dim))
    dist, found = _bellman_ford(m, verts)
    if found is not None:
        pred, relaxed = found
        raise NegativeCycleError(_extract_cycle(pred, relaxed, len(verts)))
    return tuple(dist[v] for v in verts)


def scc_decompose(b: BoolMatrix) -> list[tuple[int, ...]]:
    """Strongly connected components, sources first."""
    n = b.dim
    succ = [[j for j in range(n) if b.rows[i] >> j & 1] for i in range(n)]
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = 0
    for root in range(n):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            recurse = False
            while i < len(succ[v]):
                w = succ[v][i]
                i += 1
                if w not in index:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    comps.reverse()
    return comps

"""Cost and depth of extended words, and deep sub-cactus selection.

The cost of a cactus letter is ``2 ** (16 * (m * |S| * cost(inner)) ** 2)``,
which cannot be materialized. ``CostValue`` stores numbers of the form
``sum(c_i * 2 ** e_i)`` where each exponent is an int or another
``CostValue``; comparisons are exact.
"""

from __future__ import annotations

from functools import total_ordering
from typing import Union

from .cactus import Calculus
from .extword import Base, Cactus, ExtWord, Item, Jump, Power, Rebase

# exponents up to this size are expanded into plain integers
_MATERIALIZE_BITS = 4096

Exponent = Union[int, "CostValue"]


class CostUndefinedForRebase(ValueError):
    pass


def _exp_cmp(a: Exponent, b: Exponent) -> int:
    if isinstance(a, int) and isinstance(b, int):
        return (a > b) - (a < b)
    return _as_cost(a).compare(_as_cost(b))


def _exp_add(a: Exponent, b: Exponent) -> Exponent:
    if isinstance(a, int) and isinstance(b, int):
        return a + b
    return _simplify_exp(_as_cost(a) + _as_cost(b))


def _simplify_exp(e: Exponent) -> Exponent:
    if isinstance(e, CostValue) and e.plain is not None:
        return e.plain
    return e


def _as_cost(x: Exponent) -> "CostValue":
    return x if isinstance(x, CostValue) else CostValue.of(x)


@total_ordering
class CostValue:
    """Exact nonnegative integer ``sum(coeff * 2 ** exponent)`` with symbolic exponents."""

    __slots__ = ("terms",)
    __hash__ = None  # equal values may have different term structure

    def __init__(self, terms: tuple[tuple[Exponent, int], ...]):
        # terms: (exponent, coefficient), exponent 0 holds the plain part
        self.terms = terms

    @classmethod
    def of(cls, n: int) -> "CostValue":
        if n < 0:
            raise ValueError("costs are nonnegative")
        return cls(((0, n),) if n else ())

    @classmethod
    def _build(cls, raw: list[tuple[Exponent, int]]) -> "CostValue":
        plain = 0
        symbolic: list[tuple[Exponent, int]] = []
        for e, c in raw:
            if c == 0:
                continue
            e = _simplify_exp(e)
            if isinstance(e, int) and e < _MATERIALIZE_BITS:
                plain += c << e
                continue
            for i, (e2, c2) in enumerate(symbolic):
                if _exp_cmp(e, e2) == 0:
                    symbolic[i] = (e2, c2 + c)
                    break
            else:
                symbolic.append((e, c))
        terms = ([(0, plain)] if plain else []) + symbolic
        return cls(tuple(terms))

    @classmethod
    def power_of_two(cls, e: Exponent) -> "CostValue":
        return cls._build([(e, 1)])

    @property
    def plain(self) -> int | None:
        """The value as an int when it has no symbolic part."""
        if all(isinstance(e, int) and e == 0 for e, _ in self.terms):
            return sum(c for _, c in self.terms)
        return None

    def __add__(self, other: "CostValue | int") -> "CostValue":
        other = _as_cost(other) if isinstance(other, int) else other
        return CostValue._build(list(self.terms) + list(other.terms))

    __radd__ = __add__

    def scale(self, k: int) -> "CostValue":
        if k < 0:
            raise ValueError("negative scale")
        return CostValue._build([(e, c * k) for e, c in self.terms])

    def square(self) -> "CostValue":
        raw = []
        for e1, c1 in self.terms:
            for e2, c2 in self.terms:
                raw.append((_exp_add(e1, e2), c1 * c2))
        return CostValue._build(raw)

    def compare(self, other: "CostValue") -> int:
        """Sign of self - other."""
        p, q = self.plain, other.plain
        if p is not None and q is not None:
            return (p > q) - (p < q)
        return _sign([(e, c) for e, c in self.terms] + [(e, -c) for e, c in other.terms])

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = CostValue.of(other)
        if not isinstance(other, CostValue):
            return NotImplemented
        return self.compare(other) == 0

    def __lt__(self, other: "CostValue | int") -> bool:
        if isinstance(other, int):
            other = CostValue.of(other)
        return self.compare(other) < 0

    def log2_exponents(self) -> tuple[Exponent, ...]:
        return tuple(e for e, _ in self.terms)

    def __repr__(self) -> str:
        if self.plain is not None:
            return str(self.plain)
        parts = []
        for e, c in self.terms:
            if isinstance(e, int) and e == 0:
                parts.append(str(c))
            else:
                exp = str(e) if isinstance(e, int) and e.bit_length() < 64 else f"({e!r})" if isinstance(e, CostValue) else f"<{e.bit_length()}-bit>"
                parts.append(f"{c}*2^{exp}" if c != 1 else f"2^{exp}")
        return " + ".join(parts)


def _sign(raw: list[tuple[Exponent, int]]) -> int:
    """Exact sign of sum(c * 2**e) with integer exponents (possibly symbolic)."""
    terms: list[tuple[Exponent, int]] = []
    for e, c in raw:
        e = _simplify_exp(e)
        for i, (e2, c2) in enumerate(terms):
            if _exp_cmp(e, e2) == 0:
                terms[i] = (e2, c2 + c)
                break
        else:
            terms.append((e, c))
    terms = [(e, c) for e, c in terms if c]
    _sort_desc(terms)
    while terms:
        e1, c1 = terms[0]
        if len(terms) == 1:
            return 1 if c1 > 0 else -1
        e2, c2 = terms[1]
        rest = sum(abs(c) for _, c in terms[1:])
        gap = rest.bit_length() + 1
        # the rest is below rest * 2**e2 < 2**(e2 + gap - 1) <= |c1| * 2**e1 once e1 >= e2 + gap
        if _exp_cmp(e1, _exp_add(e2, gap)) >= 0:
            return 1 if c1 > 0 else -1
        lo, hi = 1, gap - 1  # e1 - e2 lies in [lo, hi]
        while lo < hi:
            mid = (lo + hi) // 2
            if _exp_cmp(e1, _exp_add(e2, mid)) <= 0:
                hi = mid
            else:
                lo = mid + 1
        merged = (c1 << lo) + c2
        terms = ([(e2, merged)] if merged else []) + terms[2:]
    return 0


def _sort_desc(terms: list[tuple[Exponent, int]]) -> None:
    # insertion sort with the exact exponent comparator; term lists are short
    for i in range(1, len(terms)):
        j = i
        while j > 0 and _exp_cmp(terms[j - 1][0], terms[j][0]) < 0:
            terms[j - 1], terms[j] = terms[j], terms[j - 1]
            j -= 1


# --------------------------------------------------------------- cost, depth


def cost(calc: Calculus, word: ExtWord) -> CostValue:
    total = CostValue.of(0)
    for item in word:
        total = total + letter_cost(calc, item)
    return total


def letter_cost(calc: Calculus, item: Item) -> CostValue:
    if isinstance(item, Base):
        return CostValue.of(calc.aug.letter_wmax(item) + 1)
    if isinstance(item, Cactus):
        k = calc.constants.m_frak * calc.size_s
        exponent = cost(calc, item.word).scale(k).square().scale(16)
        return CostValue.power_of_two(exponent)
    if isinstance(item, Power):
        return cost(calc, item.word).scale(item.exponent)
    if isinstance(item, (Rebase, Jump)):
        raise CostUndefinedForRebase("cost is defined only for base and cactus letters")
    raise TypeError(item)


def depth(word: ExtWord) -> int:
    return max((letter_depth(x) for x in word), default=0)


def letter_depth(item: Item) -> int:
    if isinstance(item, Base):
        return 1
    if isinstance(item, Cactus):
        return 1 + depth(item.word)
    if isinstance(item, Power):
        return depth(item.word)
    if isinstance(item, (Rebase, Jump)):
        raise CostUndefinedForRebase("depth is defined only for base and cactus letters")
    raise TypeError(item)


def sub_k(word: ExtWord, k: int) -> frozenset[Item]:
    """Letters found exactly ``k`` cactus levels below the top of ``word``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out: set[Item] = set()
    for item in word:
        if k == 0:
            out.add(item)
        elif isinstance(item, Cactus):
            out |= sub_k(item.word, k - 1)
    return frozenset(out)

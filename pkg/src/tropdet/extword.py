"""Augmented states, extended letters and their s-expression format.

An extended word is a tuple of items. Items are base transitions, cactus
letters, rebase letters, jump letters, or ``Power`` nodes that stand for a
word repeated a (possibly astronomically large) number of times.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence, Union

from .wfa import ParseError, ValidationError, Wfa


class MalformedLetter(ValueError):
    pass


class NotSaturated(ValueError):
    pass


@dataclass(frozen=True)
class Block:
    """The deterministic (baseline, reach) part shared by all states of a configuration."""

    base: str
    reach: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.base not in self.reach:
            raise MalformedLetter(f"baseline {self.base!r} not in reach {self.reach}")

    def index(self, q: str) -> int:
        return self.reach.index(q)

    def states(self) -> tuple["AugState", ...]:
        return tuple(AugState(q, self.base, self.reach) for q in self.reach)

    def rebased(self, base: str) -> "Block":
        return Block(base, self.reach)

    def __str__(self) -> str:
        return f"{self.base}|{{{','.join(self.reach)}}}"


@dataclass(frozen=True)
class AugState:
    inner: str
    base: str
    reach: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.inner not in self.reach or self.base not in self.reach:
            raise MalformedLetter(f"state {self} has inner/base outside reach")

    @property
    def block(self) -> Block:
        return Block(self.base, self.reach)

    def __str__(self) -> str:
        return f"{self.inner}|{self.base}|{{{','.join(self.reach)}}}"


def make_block(a: Wfa, base: str, reach) -> Block:
    """Block with reach sorted in the automaton's state order."""
    return Block(base, tuple(sorted(set(reach), key=a.state_index.__getitem__)))


@dataclass(frozen=True)
class Base:
    src: str
    letter: str
    weight: int
    dst: str


@dataclass(frozen=True)
class Cactus:
    block: Block
    word: "ExtWord"

    @cached_property
    def _hash(self) -> int:
        return hash((self.block, self.word))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True)
class Rebase:
    """Traverse a cactus from inner state ``src`` to ``dst`` while moving the baseline."""

    block: Block
    word: "ExtWord"
    src: str
    dst: str

    @cached_property
    def _hash(self) -> int:
        return hash((self.block, self.word, self.src, self.dst))

    def __hash__(self) -> int:
        return self._hash

    @property
    def cactus(self) -> Cactus:
        return Cactus(self.block, self.word)


@dataclass(frozen=True)
class Jump:
    src: str
    dst: str
    reach: tuple[str, ...]


@dataclass(frozen=True)
class Power:
    word: "ExtWord"
    exponent: int

    @cached_property
    def _hash(self) -> int:
        return hash((self.word, self.exponent))

    def __hash__(self) -> int:
        return self._hash


Letter = Union[Base, Cactus, Rebase, Jump]
Item = Union[Base, Cactus, Rebase, Jump, Power]
ExtWord = tuple  # tuple[Item, ...]


def iter_letters(word: ExtWord) -> Iterator[Letter]:
    """Top-level letters, descending into Power bodies once."""
    for item in word:
        if isinstance(item, Power):
            yield from iter_letters(item.word)
        else:
            yield item


def has_jump(word: ExtWord) -> bool:
    return any(isinstance(x, Jump) for x in iter_letters(word))


def substitute(word: ExtWord, target: Letter, replacement: ExtWord) -> ExtWord:
    """Replace every top-level occurrence of ``target`` (inside Power bodies too)."""
    out: list[Item] = []
    for item in word:
        if isinstance(item, Power):
            out.append(Power(substitute(item.word, target, replacement), item.exponent))
        elif item == target:
            out.extend(replacement)
        else:
            out.append(item)
    return tuple(out)


def base_word(a: Wfa, states: Sequence[str], letters: Sequence[str]) -> ExtWord:
    """Base letters following the A-run through ``states`` on ``letters``."""
    out = []
    for p, s, q in zip(states, letters, states[1:]):
        c = a.weight(p, s, q)
        if not isinstance(c, int):
            raise MalformedLetter(f"no transition {p} --{s}--> {q}")
        out.append(Base(p, s, c, q))
    return tuple(out)


# --------------------------------------------------------------- s-expressions

_SEXP_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _read_sexp(text: str):
    tokens = [(m.group(0), m.start()) for m in _SEXP_TOKEN.finditer(text)]
    pos = 0

    def where(offset: int) -> tuple[int, int]:
        line = text.count("\n", 0, offset) + 1
        col = offset - (text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", *where(len(text)))
        tok, off = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while True:
                if pos >= len(tokens):
                    raise ParseError("unclosed parenthesis", *where(off))
                if tokens[pos][0] == ")":
                    pos += 1
                    return items
                items.append(read())
        if tok == ")":
            raise ParseError("unexpected ')'", *where(off))
        return tok

    forms = []
    while pos < len(tokens):
        forms.append(read())
    return forms


def _parse_state_set(a: Wfa, form) -> list[AugState]:
    if not isinstance(form, list) or not form or form[0] != "set":
        raise MalformedLetter(f"expected (set ...), got {form!r}")
    return [_parse_aug_state(a, tok) for tok in form[1:]]


def _parse_aug_state(a: Wfa, tok) -> AugState:
    m = re.fullmatch(r"([^|{}]+)\|([^|{}]+)\|\{([^{}]*)\}", tok) if isinstance(tok, str) else None
    if m is None:
        raise MalformedLetter(f"bad augmented state {tok!r}")
    reach = [x for x in m.group(3).split(",") if x]
    for q in [m.group(1), m.group(2), *reach]:
        if q not in a.state_index:
            raise ValidationError(f"unknown state {q!r}")
    block = make_block(a, m.group(2), reach)
    return AugState(m.group(1), block.base, block.reach)


def _block_of_set(states: list[AugState]) -> Block:
    if not states:
        raise NotSaturated("empty state set")
    block = states[0].block
    if any(s.block != block for s in states) or {s.inner for s in states} != set(block.reach):
        raise NotSaturated("state set is not a full (baseline, reach) block")
    return block


def _parse_word_form(a: Wfa, form) -> ExtWord:
    if not isinstance(form, list) or not form or form[0] != "word":
        raise MalformedLetter(f"expected (word ...), got {form!r}")
    return tuple(_parse_item(a, f) for f in form[1:])


def _parse_item(a: Wfa, form) -> Item:
    if not isinstance(form, list) or not form:
        raise MalformedLetter(f"expected a letter form, got {form!r}")
    head, args = form[0], form[1:]
    if head == "base":
        if len(args) != 4 or not all(isinstance(x, str) for x in args):
            raise MalformedLetter("expected (base p letter weight q)")
        p, s, w, q = args
        try:
            weight = int(w)
        except ValueError:
            raise MalformedLetter(f"bad weight {w!r}") from None
        if a.weight(p, s, q) != weight:
            raise MalformedLetter(f"no transition {p} {s} {weight} {q} in the automaton")
        return Base(p, s, weight, q)
    if head == "cactus":
        if len(args) != 2:
            raise MalformedLetter("expected (cactus (set ...) (word ...))")
        return Cactus(_block_of_set(_parse_state_set(a, args[0])), _parse_word_form(a, args[1]))
    if head == "rebase":
        if len(args) != 4:
            raise MalformedLetter("expected (rebase (set ...) (word ...) s r)")
        block = _block_of_set(_parse_state_set(a, args[0]))
        s, r = _parse_aug_state(a, args[2]), _parse_aug_state(a, args[3])
        if s.block != block or r.block != block:
            raise MalformedLetter("rebase endpoints must lie in the cactus block")
        return Rebase(block, _parse_word_form(a, args[1]), s.inner, r.inner)
    if head == "jump":
        if len(args) != 3:
            raise MalformedLetter("expected (jump p p' (set ...))")
        p, p2 = args[0], args[1]
        if not isinstance(args[2], list) or args[2][:1] != ["set"]:
            raise MalformedLetter("expected (set q ...) in jump")
        reach = make_block(a, p, args[2][1:]).reach
        if p not in reach or p2 not in reach:
            raise MalformedLetter("jump endpoints must lie in the reach set")
        return Jump(p, p2, reach)
    if head == "pow":
        if len(args) != 2:
            raise MalformedLetter("expected (pow exponent (word ...))")
        try:
            e = int(args[0])
        except (TypeError, ValueError):
            raise MalformedLetter(f"bad exponent {args[0]!r}") from None
        if e < 0:
            raise MalformedLetter("negative exponent")
        return Power(_parse_word_form(a, args[1]), e)
    raise MalformedLetter(f"unknown letter kind {head!r}")


def parse_extword(a: Wfa, text: str) -> ExtWord:
    forms = _read_sexp(text)
    if len(forms) != 1:
        raise MalformedLetter("expected exactly one (word ...) form")
    return _parse_word_form(a, forms[0])


def parse_letter(a: Wfa, text: str) -> Item:
    forms = _read_sexp(text)
    if len(forms) != 1:
        raise MalformedLetter("expected exactly one letter form")
    return _parse_item(a, forms[0])


def parse_witness(a: Wfa, text: str) -> tuple[ExtWord, ExtWord, ExtWord]:
    """``(witness (word ...) (word ...) (word ...))``."""
    forms = _read_sexp(text)
    if len(forms) != 1 or not isinstance(forms[0], list) or forms[0][:1] != ["witness"] or len(forms[0]) != 4:
        raise MalformedLetter("expected (witness (word ...) (word ...) (word ...))")
    w1, w2, w3 = (_parse_word_form(a, f) for f in forms[0][1:])
    return w1, w2, w3


def format_block_set(block: Block) -> str:
    return "(set " + " ".join(str(s) for s in block.states()) + ")"


def format_item(item: Item) -> str:
    if isinstance(item, Base):
        return f"(base {item.src} {item.letter} {item.weight} {item.dst})"
    if isinstance(item, Cactus):
        return f"(cactus {format_block_set(item.block)} {format_extword(item.word)})"
    if isinstance(item, Rebase):
        s = AugState(item.src, item.block.base, item.block.reach)
        r = AugState(item.dst, item.block.base, item.block.reach)
        return f"(rebase {format_block_set(item.block)} {format_extword(item.word)} {s} {r})"
    if isinstance(item, Jump):
        return f"(jump {item.src} {item.dst} (set {' '.join(item.reach)}))"
    if isinstance(item, Power):
        return f"(pow {item.exponent} {format_extword(item.word)})"
    raise TypeError(item)


def format_extword(word: ExtWord) -> str:
    return "(word" + "".join(" " + format_item(x) for x in word) + ")"


def format_witness(w1: ExtWord, w2: ExtWord, w3: ExtWord) -> str:
    return f"(witness {format_extword(w1)} {format_extword(w2)} {format_extword(w3)})"

"""Command-line front end.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 input error,
3 budget or state cap exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import (
    Determinizable,
    Nondeterminizable,
    NoSeamlessBaseline,
    WitnessCandidate,
    charge,
    check_witness,
    decide,
    default_pool,
    determinize_with_bound,
    equivalence_of_determinizer_output,
    gap_witness_search,
    nfa_to_wfa_reduction,
    potential,
)
from .augmented import StateBudgetExceeded
from .cactus import Calculus, Rejection
from .extword import Cactus, format_extword, format_witness, parse_extword, parse_letter, parse_witness
from .tropical import INF
from .wfa import (
    Wfa,
    WfaIF,
    evaluate,
    next_conf,
    initial_configuration,
    parse_nfa,
    parse_wfa,
    parse_word,
    serialize_wfa,
    strip_initial_final,
)

OK, NEGATIVE, INPUT_ERROR, EXHAUSTED = 0, 1, 2, 3

# integers with more decimal digits than this print as a power-of-two magnitude
_MAX_DIGITS = 10**6


class UsageError(Exception):
    pass


def fmt(value) -> str:
    if value is INF:
        return "inf"
    if isinstance(value, int) and value.bit_length() > _MAX_DIGITS * 3.33:
        return f"{'-' if value < 0 else ''}~2^{abs(value).bit_length() - 1}"
    return str(value)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _wfa(path: str) -> Wfa:
    a = parse_wfa(_read(path))
    if isinstance(a, WfaIF):
        raise UsageError(f"{path} uses init/fin weights; convert it with strip-if first")
    return a


def _sexp(arg: str) -> str:
    """Inline s-expression, or the contents of the named file."""
    return arg if arg.lstrip().startswith("(") else _read(arg)


def _word_text(a, arg: str):
    return parse_word(a.alphabet, arg)


# ------------------------------------------------------------------ commands


def cmd_eval(args, out) -> int:
    a = parse_wfa(_read(args.automaton))
    word = _word_text(a, args.word)
    out.append(fmt(a.evaluate(word) if isinstance(a, WfaIF) else evaluate(a, word)))
    return OK


def cmd_conf(args, out) -> int:
    a = _wfa(args.automaton)
    c = next_conf(a, initial_configuration(a), _word_text(a, args.word))
    if args.normalized:
        c = c.normalized()
    out.extend(f"{q}: {fmt(v)}" for q, v in zip(c.states, c.values))
    return OK


def cmd_determinize(args, out) -> int:
    a = _wfa(args.automaton)
    d = determinize_with_bound(a, args.bound, args.state_cap)
    if not args.check:
        out.append(serialize_wfa(d).rstrip("\n"))
        return OK
    cex = equivalence_of_determinizer_output(a, d)
    if cex is None:
        out.append("verdict: equivalent")
        out.append(f"states: {len(d.states)}")
        return OK
    out.append("verdict: inequivalent")
    out.append(f"evidence: word {''.join(cex.word) or 'eps'} original {fmt(cex.a_value)} determinized {fmt(cex.d_value)}")
    return NEGATIVE


def cmd_check_witness(args, out) -> int:
    a = _wfa(args.automaton)
    calc = Calculus(a)
    w1, w2, w3 = parse_witness(a, _sexp(args.witness))
    verdict = check_witness(calc, WitnessCandidate(w1, w2, w3, args.type_rank))
    out.append(verdict.report())
    return OK if verdict.accepted else NEGATIVE


def cmd_gap_search(args, out) -> int:
    a = _wfa(args.automaton)
    w = gap_witness_search(a, args.bound, args.max_x, args.max_y)
    if w is None:
        out.append("no witness within bounds")
        return NEGATIVE
    out += [
        f"x: {''.join(w.x) or 'eps'}",
        f"y: {''.join(w.y) or 'eps'}",
        f"q: {w.q}",
        f"gap: {w.gap}",
        f"value: {fmt(w.value_xy)}",
        f"strict: {'yes' if w.strict else 'no'}",
    ]
    return OK


def _cactus_arg(a, arg: str) -> Cactus:
    letter = parse_letter(a, _sexp(arg))
    if not isinstance(letter, Cactus):
        raise UsageError("expected a (cactus (set ...) (word ...)) form")
    return letter


def _matrix_lines(block, m) -> list[str]:
    width = max(len(q) for q in block.reach)
    lines = []
    for q, row in zip(block.reach, m.rows):
        lines.append(f"  {q.ljust(width)} " + " ".join(fmt(x) for x in row))
    return lines


def cmd_stabilize(args, out) -> int:
    a = _wfa(args.automaton)
    calc = Calculus(a)
    letter = _cactus_arg(a, args.cactus)
    cert = calc.check_stable_cycle(letter.block, letter.word)
    if isinstance(cert, Rejection):
        out.append(f"verdict: rejected ({cert.reason})")
        out.append(f"evidence: {cert.detail}")
        return NEGATIVE
    out.append("verdict: stable")
    out.append(f"block: {cert.block}")
    out.append(f"idempotent: index {cert.profile.index} period {cert.profile.period}")
    out.append("cycle matrix:")
    out += _matrix_lines(cert.block, cert.matrix)
    out.append("cactus matrix:")
    out += _matrix_lines(cert.block, cert.cactus)
    return OK


def cmd_classify(args, out) -> int:
    a = _wfa(args.automaton)
    calc = Calculus(a)
    letter = _cactus_arg(a, args.cactus)
    cert = calc.check_stable_cycle(letter.block, letter.word)
    if isinstance(cert, Rejection):
        out.append(f"verdict: rejected ({cert.reason})")
        out.append(f"evidence: {cert.detail}")
        return NEGATIVE
    out.append(cert.report())
    deg = calc.degeneracy_check(cert)
    if deg.degenerate:
        out.append("degenerate: yes")
    else:
        out.append(f"degenerate: no (witness {deg.witness[0]}->{deg.witness[1]})")
    return OK


def cmd_flatten(args, out) -> int:
    a = _wfa(args.automaton)
    calc = Calculus(a)
    word = parse_extword(a, _sexp(args.word))
    out.append(format_extword(calc.flatten(word, args.margin)))
    return OK


def cmd_unfold(args, out) -> int:
    a = _wfa(args.automaton)
    calc = Calculus(a)
    word = parse_extword(a, _sexp(args.word))
    i = args.index
    if not 0 <= i < len(word) or not isinstance(word[i], Cactus):
        raise UsageError(f"letter {i} is not a cactus letter")
    out.append(format_extword(calc.unfold(word[:i], word[i], word[i + 1 :], args.margin)))
    return OK


def cmd_potential(args, out) -> int:
    a = _wfa(args.automaton)
    calc = Calculus(a)
    word = parse_extword(a, _sexp(args.word))
    extra = parse_extword(a, _sexp(args.pool)) if args.pool else ()
    out.append(fmt(potential(calc, word, default_pool(calc, extra))))
    return OK


def cmd_charge(args, out) -> int:
    a = _wfa(args.automaton)
    calc = Calculus(a)
    out.append(fmt(charge(calc, parse_extword(a, _sexp(args.word)))))
    return OK


def cmd_decide(args, out) -> int:
    a = _wfa(args.automaton)
    verdict = decide(a, args.budget, args.state_cap)
    if isinstance(verdict, Determinizable):
        out.append(f"verdict: determinizable (B={verdict.bound})")
        out.append(f"round: {verdict.round}")
        out.append(f"evidence: {len(verdict.automaton.states)} states")
        return OK
    if isinstance(verdict, Nondeterminizable):
        w = verdict.witness
        out.append("verdict: nondeterminizable")
        out.append(f"round: {verdict.round}")
        out.append(f"evidence: {format_witness(w.w1, w.w2, w.w3)}")
        return OK
    out.append("verdict: unknown")
    out.append(f"round: {verdict.budget}")
    return EXHAUSTED


def cmd_from_nfa(args, out) -> int:
    out.append(serialize_wfa(nfa_to_wfa_reduction(parse_nfa(_read(args.nfa)))).rstrip("\n"))
    return OK


def cmd_strip_if(args, out) -> int:
    a = parse_wfa(_read(args.automaton))
    if not isinstance(a, WfaIF):
        raise UsageError("automaton has no init/fin weights")
    out.append(serialize_wfa(strip_initial_final(a)).rstrip("\n"))
    return OK


# -------------------------------------------------------------------- parser


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{message}\n{self.format_usage().rstrip()}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tropdet", description="Determinizability analysis for min-plus automata.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("eval", cmd_eval, "value of a word")
    sp.add_argument("automaton")
    sp.add_argument("word")

    sp = add("conf", cmd_conf, "configuration after a word")
    sp.add_argument("automaton")
    sp.add_argument("word")
    sp.add_argument("--normalized", action="store_true")

    sp = add("determinize", cmd_determinize, "gap-bounded determinization")
    sp.add_argument("automaton")
    sp.add_argument("--bound", type=_nonneg, required=True)
    sp.add_argument("--state-cap", type=_nonneg, default=10_000)
    sp.add_argument("--check", action="store_true", help="check equivalence instead of printing")

    sp = add("check-witness", cmd_check_witness, "verify a (witness ...) candidate")
    sp.add_argument("automaton")
    sp.add_argument("witness", help="file or inline s-expression")
    sp.add_argument("--type-rank", type=_nonneg, default=None)

    sp = add("gap-search", cmd_gap_search, "search for a gap witness")
    sp.add_argument("automaton")
    sp.add_argument("--bound", type=_nonneg, required=True)
    sp.add_argument("--max-x", type=_nonneg, default=6)
    sp.add_argument("--max-y", type=_nonneg, default=6)

    for name, func, h in (
        ("stabilize", cmd_stabilize, "certify a stable cycle"),
        ("classify", cmd_classify, "pair tables of a stable cycle"),
    ):
        sp = add(name, func, h)
        sp.add_argument("automaton")
        sp.add_argument("cactus", help="file or inline (cactus ...) form")

    sp = add("flatten", cmd_flatten, "replace cactus and rebase letters by repetitions")
    sp.add_argument("automaton")
    sp.add_argument("word", help="file or inline (word ...) form")
    sp.add_argument("--margin", type=_nonneg, required=True)

    sp = add("unfold", cmd_unfold, "unfold one cactus letter")
    sp.add_argument("automaton")
    sp.add_argument("word", help="file or inline (word ...) form")
    sp.add_argument("--index", type=_nonneg, required=True)
    sp.add_argument("--margin", type=_nonneg, required=True)

    sp = add("potential", cmd_potential, "height of the highest dominant state")
    sp.add_argument("automaton")
    sp.add_argument("word", help="file or inline (word ...) form")
    sp.add_argument("--pool", default=None, help="extra letters as a (word ...) form")

    sp = add("charge", cmd_charge, "depth of the configuration minimum below the baseline")
    sp.add_argument("automaton")
    sp.add_argument("word", help="file or inline (word ...) form")

    sp = add("decide", cmd_decide, "budgeted dual semi-decision")
    sp.add_argument("automaton")
    sp.add_argument("--budget", type=_nonneg, required=True)
    sp.add_argument("--state-cap", type=_nonneg, default=10_000)

    sp = add("from-nfa", cmd_from_nfa, "reduction from NFA universality")
    sp.add_argument("nfa")

    sp = add("strip-if", cmd_strip_if, "encode init/fin weights with fresh letters")
    sp.add_argument("automaton")
    return p


def run(argv: list[str]) -> tuple[int, str, str]:
    """Dispatch and return (exit code, stdout text, stderr text)."""
    out: list[str] = []
    try:
        args = build_parser().parse_args(argv)
        code = args.func(args, out)
    except UsageError as exc:
        return INPUT_ERROR, "", f"error: {exc}\n"
    except StateBudgetExceeded as exc:
        return EXHAUSTED, "", f"error: {exc}\n"
    except NoSeamlessBaseline as exc:
        return INPUT_ERROR, "", f"error: {exc}\n"
    except ValueError as exc:
        return INPUT_ERROR, "", f"error: {type(exc).__name__}: {exc}\n"
    return code, "".join(line + "\n" for line in out), ""


def main(argv: list[str] | None = None) -> int:
    code, stdout, stderr = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(stdout)
    sys.stderr.write(stderr)
    return code

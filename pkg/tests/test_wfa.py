import random

import pytest

from oracles import brute_conf, brute_eval, omin, random_wfa, to_inf, words
from tropdet import fixtures
from tropdet.tropical import INF
from tropdet.wfa import (
    AlphabetCollision,
    Configuration,
    DeadConfiguration,
    InvalidRun,
    Nfa,
    ParseError,
    UnknownLetter,
    ValidationError,
    Wfa,
    WfaIF,
    boolean_reach,
    configuration,
    effect_bounds,
    evaluate,
    initial_configuration,
    next_conf,
    parse_nfa,
    parse_wfa,
    parse_word,
    run_from_states,
    seamless_check,
    serialize_nfa,
    serialize_wfa,
    shifted_step,
    strip_initial_final,
    validate_trim,
)

FIXTURES = ["fig1", "running", "det", "bounded_gap", "twoloop", "chain"]


# ---------------------------------------------------------------- format


def test_fig1_parses(fig1):
    assert isinstance(fig1, Wfa)
    assert fig1.states == ("s", "qa", "qb") and fig1.alphabet == ("a", "b")


@pytest.mark.parametrize("name", FIXTURES)
def test_round_trip_modulo_comments(name):
    text = fixtures.text(name + ".wfa")
    stripped = "".join(line + "\n" for line in text.splitlines() if not line.startswith("#"))
    assert serialize_wfa(parse_wfa(text)) == stripped


def test_undeclared_state_rejected():
    with pytest.raises(ValidationError):
        parse_wfa("alphabet a\nstates p\ninitial p\ntrans p a 0 x\n")


def test_duplicate_triple_rejected():
    with pytest.raises(ValidationError):
        parse_wfa("alphabet a\nstates p\ninitial p\ntrans p a 0 p\ntrans p a 1 p\n")


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_wfa("alphabet a\nstates p\ninitial p\ntrans p a zz p\n")
    assert (exc.value.line, exc.value.column) == (4, 11)


def test_unknown_directive():
    with pytest.raises(ParseError) as exc:
        parse_wfa("alphabet a\n  bogus x\n")
    assert (exc.value.line, exc.value.column) == (2, 3)


def test_inf_weight_means_absent():
    a = parse_wfa("alphabet a\nstates p\ninitial p\ntrans p a inf p\n")
    assert a.weights == {} and evaluate(a, "a") is INF


def test_hash_letter_is_not_a_comment():
    a = parse_wfa("alphabet # a\nstates p\ninitial p\ntrans p # 2 p\n")
    assert evaluate(a, ("#",)) == 2


def test_wfaif_round_trip():
    text = "alphabet a\nstates p q\ninit p 0\ninit q 2\nfin q 1\ntrans p a 1 q\n"
    a = parse_wfa(text)
    assert isinstance(a, WfaIF)
    assert serialize_wfa(a) == text


def test_nfa_round_trip():
    text = "alphabet 0 1\nstates n0 n1\ninitial n0\naccepting n1\ntrans n0 0 n1\ntrans n1 1 n1\n"
    n = parse_nfa(text)
    assert serialize_nfa(n) == text
    assert n.accepts("01") and not n.accepts("1")


def test_parse_word_forms():
    assert parse_word(("a", "b"), "aab") == ("a", "a", "b")
    assert parse_word(("ab", "c"), "ab c") == ("ab", "c")
    assert parse_word(("a",), "eps") == ()
    with pytest.raises(UnknownLetter):
        parse_word(("a",), "ab")


# -------------------------------------------------------------- trimming


def test_trim_noop(fig1):
    b, removed = validate_trim(fig1)
    assert b is fig1 and removed == ()


def test_trim_removes_isolated(fig1):
    a = Wfa(fig1.states + ("x",), fig1.alphabet, "s", {**fig1.weights, ("x", "a", "x"): 0})
    b, removed = validate_trim(a)
    assert removed == ("x",) and b.states == fig1.states
    for w in words(a.alphabet, 6):
        assert evaluate(a, w) == evaluate(b, w)


# ------------------------------------------------------------ evaluation


def test_fig1_examples(fig1):
    assert evaluate(fig1, "") == 0
    assert evaluate(fig1, "bbb") == 0
    assert evaluate(fig1, "aab") == 1 == to_inf(brute_eval(fig1, "aab"))


def test_fig1_is_min_of_counts(fig1):
    for w in words("ab", 10):
        assert evaluate(fig1, w) == min(w.count("a"), w.count("b"))


def test_unknown_letter(fig1):
    with pytest.raises(UnknownLetter):
        evaluate(fig1, "ac")


@pytest.mark.parametrize("name", FIXTURES)
def test_eval_matches_run_enumeration(name):
    a = fixtures.load(name)
    for w in words(a.alphabet, 6 if len(a.alphabet) > 2 else 8):
        assert evaluate(a, w) == to_inf(brute_eval(a, w))


def test_eval_random_automata():
    rng = random.Random(11)
    for _ in range(30):
        a = random_wfa(rng, rng.randint(1, 4))
        for w in words(a.alphabet, 6):
            assert evaluate(a, w) == to_inf(brute_eval(a, w))


# -------------------------------------------------------- configurations


def test_next_conf_empty_word(fig1):
    c = configuration(fig1, {"qa": 2, "qb": 0})
    assert next_conf(fig1, c, "") == c


def test_running_example_trace(running):
    word = "b" + "a" + "bb" + "a" + "bbb" + "a" + "bbbb" + "a" + "bbbbb" + "a"
    c = next_conf(running, initial_configuration(running), word)
    assert (c["q"], c["p"], c["r"]) == (0, 0, 5)
    assert brute_conf(running, word) == {"s0": None, "q": 0, "p": 0, "r": 5}


def test_running_example_caption_claims(running):
    c0 = initial_configuration(running)
    base = next_conf(running, c0, "ba")
    for k in range(1, 7):
        after = next_conf(running, base, "b" * k)
        assert after["p"] - base["p"] == k
    # reading b^6 a raises r by one
    c = next_conf(running, c0, "babbabbbabbbbabbbbba")
    d = next_conf(running, c, "bbbbbba")
    assert d["r"] == c["r"] + 1
    # aa resets every counter
    e = next_conf(running, d, "aa")
    assert (e["q"], e["p"], e["r"]) == (0, 0, 0)
    # c kills all but r
    f = next_conf(running, d, "c")
    assert f.support == frozenset({"r"})


def test_next_conf_composition():
    rng = random.Random(3)
    for _ in range(40):
        a = random_wfa(rng, rng.randint(1, 4))
        u = tuple(rng.choice(a.alphabet) for _ in range(rng.randint(0, 4)))
        v = tuple(rng.choice(a.alphabet) for _ in range(rng.randint(0, 4)))
        c = initial_configuration(a)
        assert next_conf(a, next_conf(a, c, u), v) == next_conf(a, c, u + v)


def test_next_conf_monotone():
    rng = random.Random(5)
    for _ in range(40):
        a = random_wfa(rng, 3)
        c = Configuration(a.states, tuple(rng.choice([INF, rng.randint(0, 4)]) for _ in a.states))
        d = Configuration(a.states, tuple(x if x is INF else x + rng.randint(0, 3) for x in c.values))
        d = Configuration(a.states, tuple(INF if rng.random() < 0.2 else x for x in d.values))
        w = tuple(rng.choice(a.alphabet) for _ in range(4))
        assert all(x <= y for x, y in zip(next_conf(a, c, w).values, next_conf(a, d, w).values))


def test_shifted_step_trace(fig1):
    c = configuration(fig1, {"qa": 0, "qb": 0})
    c, e = shifted_step(fig1, c, "a")
    assert (c["qa"], c["qb"], e) == (1, 0, 0)
    c, e = shifted_step(fig1, c, "a")
    assert (c["qa"], c["qb"], e) == (2, 0, 0)
    c, e = shifted_step(fig1, c, "b")
    assert (c["qa"], c["qb"], e) == (1, 0, 1)


def test_shifted_step_zero_loop():
    a = Wfa(("p",), ("a",), "p", {("p", "a", "p"): 0})
    c, e = shifted_step(a, initial_configuration(a), "a")
    assert c.values == (0,) and e == 0


def test_shifted_step_dead():
    with pytest.raises(DeadConfiguration):
        shifted_step(Wfa(("p",), ("a",), "p", {}), Configuration(("p",), (0,)), "a")


def test_shifted_emissions_reconstruct_eval():
    rng = random.Random(8)
    for _ in range(30):
        a = random_wfa(rng, 3)
        for w in words(a.alphabet, 5):
            c, total = initial_configuration(a), 0
            ok = True
            for s in w:
                try:
                    c, e = shifted_step(a, c, s)
                except DeadConfiguration:
                    ok = False
                    break
                total += e
            assert (total + c.minimum if ok else INF) == evaluate(a, w)


# ------------------------------------------------------- effect bounds


def test_effect_bounds_zero():
    a = Wfa(("p",), ("a",), "p", {("p", "a", "p"): 0})
    assert effect_bounds(a, "aaa") == (0, 0)


def test_effect_bounds_fig1(fig1):
    assert effect_bounds(fig1, "ab") == (1, 2)


def test_runs_bounded_by_maxeff():
    rng = random.Random(9)
    from oracles import all_runs

    for _ in range(20):
        a = random_wfa(rng, 3)
        for w in words(a.alphabet, 6):
            _, bound = effect_bounds(a, w)
            assert all(abs(wt) <= bound for _, wt in all_runs(a, w))


# -------------------------------------------------------------- seamless


def test_minimal_run_is_seamless(fig1):
    run = run_from_states(fig1, ("s", "qb", "qb", "qb"), "aab")
    assert run.weight == evaluate(fig1, "aab")
    assert seamless_check(fig1, initial_configuration(fig1), run)


def test_fig1_seamless_cases(fig1):
    c = initial_configuration(fig1)
    assert seamless_check(fig1, c, run_from_states(fig1, ("s", "qa", "qa"), "ab"))
    # s -> qb -> qb on "bb" weighs 1 then 2 while qb is reached at 1 then 2 only via this run
    assert seamless_check(fig1, c, run_from_states(fig1, ("s", "qb", "qb"), "bb"))
    two = Wfa(("i", "p"), ("a",), "i", {("i", "a", "p"): 3, ("i", "a", "i"): -1, ("p", "a", "p"): 0})
    # i -> p -> p costs 3 but i -> i -> p costs 2: not seamless at the second prefix
    assert not seamless_check(two, initial_configuration(two), run_from_states(two, ("i", "p", "p"), "aa"))


def test_deterministic_runs_seamless(det):
    for w in words(det.alphabet, 5):
        states = [det.initial]
        for s in w:
            nxt = det.successors(states[-1], s)
            if not nxt:
                break
            states.append(nxt[0][0])
        else:
            assert seamless_check(det, initial_configuration(det), run_from_states(det, states, w))


def test_seamless_invalid_run(fig1):
    with pytest.raises(InvalidRun):
        run_from_states(fig1, ("s", "s"), "a")


# -------------------------------------------------------------- reach


def test_boolean_reach(fig1):
    assert boolean_reach(fig1, {"qa"}, "") == {"qa"}
    assert boolean_reach(fig1, {"s"}, "a") == {"qa", "qb"}
    assert boolean_reach(fig1, {"qa"}, "a") == {"qa"}
    a = Wfa(("p", "q"), ("a",), "p", {("q", "a", "q"): 0})
    assert boolean_reach(a, {"p"}, "a") == frozenset()


# ---------------------------------------------------------- init/fin


def test_strip_trivial_if():
    a = WfaIF(("p",), ("a",), {("p", "a", "p"): 2}, {"p": 0}, {"p": 0})
    b = strip_initial_final(a)
    assert b.weight("s0", "s", "p") == 0 and b.weight("p", "f", "sf") == 0


def test_strip_random_if():
    rng = random.Random(12)
    for _ in range(20):
        base = random_wfa(rng, 3)
        init = {q: rng.randint(-1, 2) for q in base.states if rng.random() < 0.6} or {base.states[0]: 0}
        fin = {q: rng.randint(-1, 2) for q in base.states if rng.random() < 0.6}
        a = WfaIF(base.states, base.alphabet, base.weights, init, fin)
        b = strip_initial_final(a)
        for w in words(a.alphabet, 5):
            # independent value: minimum over runs with init and fin weights
            best = None
            for q0, iw in init.items():
                conf = brute_conf(Wfa(base.states, base.alphabet, q0, base.weights), w)
                for q, v in conf.items():
                    if v is not None and q in fin:
                        best = omin(best, iw + v + fin[q])
            assert evaluate(b, ("s",) + w + ("f",)) == to_inf(best) == a.evaluate(w)
            assert evaluate(b, w + ("f",)) is INF or len(w) == 0 and evaluate(b, ("f",)) is INF


def test_strip_collision():
    a = WfaIF(("p",), ("s",), {}, {"p": 0}, {"p": 0})
    with pytest.raises(AlphabetCollision):
        strip_initial_final(a)


def test_nfa_rejects_unknown_state():
    with pytest.raises(ValidationError):
        Nfa(("p",), ("a",), "p", frozenset({"x"}), frozenset())

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import as_lists, as_matrix, floyd_negative_cycle, naive_identity, naive_mul
from tropdet.tropical import (
    INF,
    BoolMatrix,
    DimensionMismatch,
    MinPlusMatrix,
    NegativeCycleError,
    bool_mul,
    bool_pow,
    detect_negative_cycle,
    idempotent_profile,
    johnson_reweight,
    minplus_mul,
    minplus_pow,
    parse_weight,
    scc_decompose,
    vector_mul,
    wmin,
)

entry = st.one_of(st.none(), st.integers(-5, 9))


def square(max_dim=5, entries=entry):
    return st.integers(1, max_dim).flatmap(
        lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)
    )


# ---------------------------------------------------------------- weights


def test_infinity_absorbs_addition():
    assert INF + 5 == INF and 5 + INF == INF and INF + INF == INF
    assert INF + 10**100 is INF


def test_min_with_infinity():
    assert wmin([INF, 3]) == 3 and wmin([INF]) is INF and wmin([]) is INF
    assert 3 < INF and not INF < 3 and INF > -(10**50)


def test_parse_weight():
    assert parse_weight("inf") is INF and parse_weight("-7") == -7
    with pytest.raises(ValueError):
        parse_weight("x")


# ------------------------------------------------------------- products


def test_identity_times_m():
    m = as_matrix([[0, 1], [None, 3]])
    assert minplus_mul(MinPlusMatrix.identity(2), m) == m


def test_hand_product():
    m = as_matrix([[0, 1], [None, 0]])
    assert as_lists(minplus_mul(m, m)) == [[0, 1], [None, 0]]


def test_all_infinite_absorbs():
    m = as_matrix([[0, 1], [2, 0]])
    z = MinPlusMatrix.infinite(2, 2)
    assert minplus_mul(z, m).is_all_infinite()


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        minplus_mul(MinPlusMatrix.identity(2), MinPlusMatrix.identity(3))


@given(square())
def test_product_matches_naive(rows):
    m = as_matrix(rows)
    assert as_lists(minplus_mul(m, m)) == naive_mul(rows, rows)


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(*[st.lists(st.lists(entry, min_size=n, max_size=n), min_size=n, max_size=n)] * 3)))
def test_product_associative(triple):
    a, b, c = map(as_matrix, triple)
    assert minplus_mul(minplus_mul(a, b), c) == minplus_mul(a, minplus_mul(b, c))


def test_rectangular_product():
    a = as_matrix([[0, 1, None]])
    b = as_matrix([[1], [0], [5]])
    assert as_lists(a @ b) == [[1]]


# ---------------------------------------------------------------- powers


def test_pow_zero_is_identity():
    m = as_matrix([[3, 1], [None, 2]])
    assert minplus_pow(m, 0) == MinPlusMatrix.identity(2)


def test_pow_huge_single_loop():
    assert as_lists(minplus_pow(as_matrix([[1]]), 10**12)) == [[10**12]]


def test_pow_factorial_exponent_is_exact():
    e = math.factorial(80)
    assert as_lists(minplus_pow(as_matrix([[3, None], [None, -1]]), e)) == [[3 * e, None], [None, -e]]


@given(square(4), st.integers(0, 8))
def test_pow_matches_iterated_product(rows, e):
    expected = naive_identity(len(rows))
    for _ in range(e):
        expected = naive_mul(expected, rows)
    assert as_lists(minplus_pow(as_matrix(rows), e)) == expected


def test_pow_six_random_4x4():
    rng = random.Random(7)
    for _ in range(20):
        rows = [[rng.choice([None, rng.randint(-3, 5)]) for _ in range(4)] for _ in range(4)]
        expected = naive_identity(4)
        for _ in range(6):
            expected = naive_mul(expected, rows)
        assert as_lists(minplus_pow(as_matrix(rows), 6)) == expected


def test_vector_mul():
    m = as_matrix([[0, 2], [1, None]])
    assert vector_mul((0, 5), m) == (0, 2)
    assert vector_mul((INF, INF), m) == (INF, INF)


# -------------------------------------------------------------- booleans


def naive_bool_mul(x, y):
    n = len(x)
    return [[any(x[i][k] and y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


bool_square = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=n, max_size=n)
)


@given(bool_square)
def test_bool_product_matches_naive(rows):
    b = BoolMatrix.from_lists(rows)
    assert bool_mul(b, b).to_lists() == naive_bool_mul(rows, rows)


def test_profile_identity():
    p = idempotent_profile(BoolMatrix.identity(3))
    assert (p.index, p.period) == (1, 1) and p.idempotent == BoolMatrix.identity(3)


def test_profile_two_cycle():
    p = idempotent_profile(BoolMatrix.from_lists([[False, True], [True, False]]))
    assert (p.index, p.period) == (1, 2) and p.idempotent == BoolMatrix.identity(2)


def test_profile_single_edge():
    p = idempotent_profile(BoolMatrix.from_lists([[False, True], [False, False]]))
    assert (p.index, p.period) == (2, 1) and p.idempotent == BoolMatrix.zero(2, 2)


@given(bool_square)
def test_profile_minimal_and_stable_at_factorial(rows):
    n = len(rows)
    powers = [[[i == j for j in range(n)] for i in range(n)]]
    for _ in range(40):
        powers.append(naive_bool_mul(powers[-1], rows))
    pairs = [(i, p) for i in range(1, 20) for p in range(1, 20) if powers[i] == powers[i + p]]
    i0 = min(i for i, _ in pairs)
    p0 = min(p for i, p in pairs if i == i0)
    prof = idempotent_profile(BoolMatrix.from_lists(rows))
    assert (prof.index, prof.period) == (i0, p0)
    e = prof.idempotent
    assert bool_mul(e, e) == e
    assert bool_pow(BoolMatrix.from_lists(rows), n * math.factorial(n)) == e


# ------------------------------------------------------ negative cycles


def test_no_negative_cycle_on_nonnegative():
    assert detect_negative_cycle(as_matrix([[0, 1], [2, 0]])) is None


def test_two_state_negative_cycle():
    m = as_matrix([[None, 1], [-2, None]])
    assert detect_negative_cycle(m) == (0, 1, 0)


def test_negative_self_loop():
    assert detect_negative_cycle(as_matrix([[-1]])) == (0, 0)


def test_support_restriction():
    m = as_matrix([[-1, None], [None, 0]])
    assert detect_negative_cycle(m, support=[1]) is None


@given(square(5, st.one_of(st.none(), st.integers(-3, 4))))
def test_negative_cycle_matches_floyd(rows):
    m = as_matrix(rows)
    cycle = detect_negative_cycle(m)
    assert (cycle is not None) == floyd_negative_cycle(rows)
    if cycle is not None:
        assert cycle[0] == cycle[-1]
        assert sum(rows[u][v] for u, v in zip(cycle, cycle[1:])) < 0


def test_johnson_zero_on_nonnegative():
    m = as_matrix([[0, 2], [1, None]])
    assert johnson_reweight(m) == (0, 0)


def test_johnson_reweights_example():
    m = as_matrix([[None, -2], [3, None]])
    h = johnson_reweight(m)
    assert h[1] - h[0] == -2
    assert h[0] + (-2) - h[1] >= 0 and h[1] + 3 - h[0] >= 0


def test_johnson_negative_loop():
    with pytest.raises(NegativeCycleError):
        johnson_reweight(as_matrix([[-1]]))


@given(square(5, st.one_of(st.none(), st.integers(-3, 4))))
def test_johnson_iff_no_negative_cycle(rows):
    m = as_matrix(rows)
    if detect_negative_cycle(m) is None:
        h = johnson_reweight(m)
        n = len(rows)
        assert all(h[i] + rows[i][j] - h[j] >= 0 for i in range(n) for j in range(n) if rows[i][j] is not None)
    else:
        with pytest.raises(NegativeCycleError):
            johnson_reweight(m)


# ------------------------------------------------------------------ SCCs


def test_scc_examples():
    assert scc_decompose(BoolMatrix.from_lists([[False]])) == [(0,)]
    assert scc_decompose(BoolMatrix.from_lists([[False, True], [True, False]])) == [(0, 1)]
    assert scc_decompose(BoolMatrix.from_lists([[False, True], [False, False]])) == [(0,), (1,)]


@given(bool_square)
def test_scc_matches_reachability(rows):
    n = len(rows)
    reach = [[i == j or rows[i][j] for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                reach[i][j] = reach[i][j] or (reach[i][k] and reach[k][j])
    comps = scc_decompose(BoolMatrix.from_lists(rows))
    assert sorted(v for c in comps for v in c) == list(range(n))
    where = {v: i for i, c in enumerate(comps) for v in c}
    for i in range(n):
        for j in range(n):
            assert (where[i] == where[j]) == (reach[i][j] and reach[j][i])
            if reach[i][j]:
                assert where[i] <= where[j]

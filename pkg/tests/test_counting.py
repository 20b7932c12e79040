import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlroth.core import BoundedFunction, IntegerSet, indicator
from nlroth.counting import (CountingParams, PolynomialFamily, configuration_counts, count_configurations,
                             count_operator, find_configuration, integer_root, is_configuration_free,
                             l1_control_bound, polynomial_counting_operator)

from oracles import naive_free, naive_lambda, naive_pairs


def odd_set(N):
    return IntegerSet.from_elements(N, range(1, N + 1, 2))


def test_params():
    p = CountingParams(2, 50)
    assert p.M == 5 and p.y_full == 4
    with pytest.raises(ValueError):
        CountingParams(5, 4)
    with pytest.raises(ValueError):
        CountingParams(0, 4)


def test_full_interval_n9_frozen():
    # 13 pairs (x, y): y=1 gives x=1..7, y=2 gives x=1..5, y=3 gives x=0 -> none; plus y=3 needs x+9<=9
    p = CountingParams(1, 9)
    A = IntegerSet.full(9)
    assert count_configurations(A, p) == 13
    assert count_operator(p, *[indicator(A)] * 3) == pytest.approx(13 / 27)


def test_odd_set_n9_frozen():
    assert count_configurations(odd_set(9), CountingParams(1, 9)) == 3


def test_small_free_examples():
    A = IntegerSet.from_elements(2, [1, 2])
    assert not is_configuration_free(A, CountingParams(1, 2))
    assert find_configuration(A, 1) == (1, 1)
    assert is_configuration_free(IntegerSet.from_elements(6, [1, 3, 6]), CountingParams(1, 6))
    assert is_configuration_free(IntegerSet.empty(5), CountingParams(1, 5))


def test_negative_y_configurations_are_seen():
    # x=3, y=-2: 3, 1, 7; nothing with y > 0
    A = IntegerSet.from_elements(7, [1, 3, 7])
    assert configuration_counts(A, 1) == {"positive": 0, "negative": 1, "y_max": 2}
    assert is_configuration_free(A, CountingParams(1, 7), "positive")
    assert not is_configuration_free(A, CountingParams(1, 7))
    assert find_configuration(A, 1, "both") == (3, -2)
    assert find_configuration(A, 1, "positive") is None


def test_y_equal_one_collapses_points():
    # with q = 1 and y = 1 the last two points coincide; the definition still counts it
    assert find_configuration(IntegerSet.from_elements(5, [2, 3]), 1) == (2, 1)


@given(st.integers(2, 120), st.integers(1, 5), st.integers(0, 2**32))
def test_count_matches_triple_loop(N, q, seed):
    q = min(q, N)
    rng = np.random.default_rng(seed)
    mask = rng.random(N) < rng.random()
    A = IntegerSet(N, mask)
    p = CountingParams(q, N)
    assert count_configurations(A, p) == naive_pairs(A.elements().tolist(), N, q, range(1, p.M + 1))
    assert is_configuration_free(A, p) == naive_free(A.elements().tolist(), N, q)


@given(st.integers(1, 40), st.integers(1, 4), st.integers(0, 2**32))
def test_operator_matches_naive_complex(N, q, seed):
    q = min(q, N)
    rng = np.random.default_rng(seed)
    fs = [np.exp(2j * np.pi * rng.random(N)) * rng.random(N) for _ in range(3)]
    got = count_operator(CountingParams(q, N), *[BoundedFunction(f) for f in fs])
    assert got == pytest.approx(naive_lambda(*fs, N, q), abs=1e-12)


@given(st.integers(1, 40), st.integers(0, 2**32))
def test_operator_distinct_indicators_exact(N, seed):
    rng = np.random.default_rng(seed)
    fs = [(rng.random(N) < 0.5).astype(float) for _ in range(3)]
    got = count_operator(CountingParams(1, N), *[BoundedFunction(f) for f in fs])
    assert got == pytest.approx(naive_lambda(*fs, N, 1), abs=1e-15)


@given(st.integers(1, 60), st.integers(0, 2**32), st.sampled_from([0, 1, 2]))
def test_l1_control(N, seed, i):
    rng = np.random.default_rng(seed)
    fs = [BoundedFunction(np.exp(2j * np.pi * rng.random(N)) * rng.random(N)) for _ in range(3)]
    p = CountingParams(1, N)
    assert abs(count_operator(p, *fs)) <= l1_control_bound(p, *fs, i) + 1e-12


def test_operator_is_trilinear(rng):
    N = 50
    p = CountingParams(2, N)
    f, g, h, k = [BoundedFunction(rng.uniform(-0.5, 0.5, N)) for _ in range(4)]
    lhs = count_operator(p, f + k, g, h)
    assert lhs == pytest.approx(count_operator(p, f, g, h) + count_operator(p, k, g, h), abs=1e-14)


def test_polynomial_family():
    fam = PolynomialFamily.monomials(1, 2)
    assert fam.degrees == [1, 2]
    np.testing.assert_array_equal(fam.evaluate(np.array([1, 2, 3])), [[1, 1], [2, 4], [3, 9]])
    one = BoundedFunction.constant(9)
    assert polynomial_counting_operator(9, fam, one, one, one) == pytest.approx(13 / 27)
    with pytest.raises(ValueError):
        PolynomialFamily(((0, 1), (1,)))
    with pytest.raises(ValueError):
        PolynomialFamily(((0, 0),))
    assert PolynomialFamily(((1, 0, 0), (0, 1))).degrees == [1, 2]


def test_polynomial_operator_matches_quadratic_case(rng):
    N = 60
    fs = [BoundedFunction(rng.uniform(-1, 1, N)) for _ in range(3)]
    fam = PolynomialFamily(((1,), (0, 2)))
    # y, 2 y^2 with y <= sqrt(N) is not the q = 2 operator (different range); check against a direct sum
    Y = integer_root(N, 2)
    direct = 0
    for x in range(1, N + 1):
        for y in range(1, Y + 1):
            direct += fs[0](x) * fs[1](x + y) * fs[2](x + 2 * y * y)
    assert polynomial_counting_operator(N, fam, *fs) == pytest.approx(direct / (N * Y), abs=1e-12)


def test_integer_root():
    assert integer_root(27, 3) == 3 and integer_root(26, 3) == 2 and integer_root(10**18, 2) == 10**9

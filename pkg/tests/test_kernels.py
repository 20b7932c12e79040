"""The numba loops and the numpy fallbacks must agree on every kernel."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlroth import kernels
from nlroth.kernels import frac_mul, frac_mul_array


def both(name):
    return kernels.KERNELS[name]


@given(st.integers(1, 300), st.integers(1, 6), st.integers(0, 2**32))
def test_shift_counts_agree(n, q, seed):
    rng = np.random.default_rng(seed)
    bits = (rng.random(n) < 0.5).astype(np.uint8)
    y = np.arange(-5, 9, dtype=np.int64)
    sh = np.stack([y, q * y * y], axis=1)
    loop, vec = both("shift_counts")
    np.testing.assert_array_equal(loop(bits, sh), vec(bits, sh))


def test_shift_counts_against_direct(rng):
    bits = (rng.random(200) < 0.4).astype(np.uint8)
    sh = np.array([[1, 1], [2, 4], [3, 9], [-2, 4], [70, 130]], dtype=np.int64)
    want = [sum(1 for x in range(200) if bits[x] and all(0 <= x + s < 200 and bits[x + s] for s in row)) for row in sh]
    np.testing.assert_array_equal(kernels.shift_counts_loop(bits, sh), want)


@given(st.integers(1, 80), st.integers(0, 2**32))
def test_shifted_product_sums_agree(n, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(3, n)) + 1j * rng.normal(size=(3, n))
    y = np.arange(1, 7, dtype=np.int64)
    sh = np.stack([y, y * y], axis=1)
    loop, vec = both("shifted_product_sums")
    np.testing.assert_allclose(loop(f, sh), vec(f, sh), atol=1e-10)


@given(st.integers(1, 80), st.integers(0, 2**32))
def test_pair_shift_sum_agree(n, seed):
    rng = np.random.default_rng(seed)
    ga, gb = rng.normal(size=(2, n)) + 0.5j
    sa = rng.integers(-10, 10, 5)
    sb = rng.integers(-10, 30, 5)
    loop, vec = both("pair_shift_sum")
    np.testing.assert_allclose(loop(ga, gb, sa, sb), vec(ga, gb, sa, sb), atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
def test_r3_counts_agree_and_match_direct(n):
    loop, vec = both("r3_counts")
    r = loop(n)
    np.testing.assert_array_equal(r, vec(n))
    sq = [x * x for x in range(1, n + 1)]
    direct = np.zeros(3 * n * n + 1, dtype=np.int64)
    for a in sq:
        for b in sq:
            for c in sq:
                direct[a + b + c] += 1
    np.testing.assert_array_equal(r, direct)


def test_r3_counts_small_frozen():
    np.testing.assert_array_equal(kernels.r3_counts_loop(2), [0, 0, 0, 1, 0, 0, 3, 0, 0, 3, 0, 0, 1])


@given(st.integers(0, 2**32))
def test_fourier_sums_agree(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=50) + 1j * rng.normal(size=50)
    pos = np.arange(1, 51, dtype=np.int64) * 37
    al = rng.random(7)
    loop, vec = both("fourier_sums")
    direct = [np.sum(v * np.exp(2j * np.pi * a * pos)) for a in al]
    np.testing.assert_allclose(loop(v, pos, al), direct, atol=1e-9)
    np.testing.assert_allclose(vec(v, pos, al), direct, atol=1e-9)


@given(st.integers(1, 120), st.integers(1, 4), st.booleans(), st.integers(0, 2**32))
def test_greedy_free_agree(n, q, signed, seed):
    order = np.random.default_rng(seed).permutation(n).astype(np.int64) + 1
    loop, vec = both("greedy_free")
    np.testing.assert_array_equal(loop(order, n, q, signed), vec(order, n, q, signed))


@given(st.integers(1, 60), st.integers(1, 3), st.integers(0, 2**32))
def test_creates_configuration_agree(n, q, seed):
    rng = np.random.default_rng(seed)
    member = np.r_[0, (rng.random(n) < 0.3)].astype(np.uint8)
    loop, vec = both("creates_configuration")
    for x in range(1, n + 1):
        assert bool(loop(member, x, q, True, n)) == bool(vec(member, x, q, True, n))


@given(st.integers(1, 100), st.integers(1, 20), st.integers(0, 2**32))
def test_atom_abs_sum_agree(n, k, seed):
    rng = np.random.default_rng(seed)
    ids = rng.integers(0, k, n).astype(np.int64)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    loop, vec = both("atom_abs_sum")
    assert loop(ids, v, k) == pytest.approx(vec(ids, v, k), abs=1e-9)


@given(st.integers(1, 100), st.integers(1, 12), st.integers(1, 12), st.integers(1, 6), st.integers(0, 2**32))
def test_join_abs_sum_agree_with_atom_sum(n, Ma, Mb, L, seed):
    rng = np.random.default_rng(seed)
    x = np.arange(1, n + 1)
    ka, kb = (x - 1) // Ma, (x + 2) // Mb
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    ids = np.unique(np.stack([ka, kb, x % L]), axis=1, return_inverse=True)[1].ravel()
    want = kernels.atom_abs_sum_numpy(ids, v, int(ids.max()) + 1)
    loop, vec = both("join_abs_sum")
    assert loop(ka, kb, L, v) == pytest.approx(want, abs=1e-9)
    assert vec(ka, kb, L, v) == pytest.approx(want, abs=1e-9)


@given(st.integers(1, 100), st.integers(1, 10), st.integers(0, 2**32))
def test_max_progression_sum_agree(n, step, seed):
    v = np.random.default_rng(seed).normal(size=n)
    loop, vec = both("max_progression_sum")
    direct = 0.0
    for r in range(min(step, n)):
        seq = v[r::step]
        for i in range(len(seq)):
            for j in range(i + 1, len(seq) + 1):
                direct = max(direct, abs(seq[i:j].sum()))
    assert loop(v, step) == pytest.approx(direct, abs=1e-9)
    assert vec(v, step) == pytest.approx(direct, abs=1e-9)


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**6), st.integers(0, 10**12))
def test_frac_mul_matches_exact(alpha, n):
    # reference: the exact fractional part for the float actually passed in
    a = float(alpha)
    exact = float((Fraction(a) * n) % 1)
    for got in (frac_mul(a, n), float(frac_mul_array(a, np.array([n]))[0])):
        d = abs(got - exact)
        assert min(d, 1 - d) < 1e-15

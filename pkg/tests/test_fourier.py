import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlroth.core import BoundedFunction, Progression
from nlroth.counting import CountingParams
from nlroth.fourier import (Frequency, fejer_kernel, fourier_coefficient, fourier_coefficients, grid_spectrum,
                            lipschitz_constant_along, major_arc_witness, quadratic_weyl_sum,
                            rational_approximation, sixth_moment_squares, smooth_along, weyl_frequency_finder,
                            write_spectrum)

from oracles import naive_sixth_moment


def test_frequency_reduction_and_exactness():
    a = Frequency(Fraction(7, 3))
    assert a.exact and a.value == Fraction(1, 3)
    assert a.distance_of_multiple(3) == 0.0
    assert Frequency(-0.25).value == 0.75
    assert (-Frequency(Fraction(1, 4))).value == Fraction(3, 4)
    assert Frequency(0.3).scaled(-1).value == pytest.approx(0.7)
    assert Frequency(1.0).value == 0.0


def test_fourier_coefficient_matches_direct(rng):
    f = BoundedFunction(rng.uniform(-1, 1, 37))
    for a in (0.0, 0.123, Fraction(2, 5)):
        direct = sum(f(x) * np.exp(2j * np.pi * float(a) * x) for x in range(1, 38))
        assert fourier_coefficient(f, a) == pytest.approx(direct, abs=1e-10)


def test_grid_spectrum_matches_direct(rng):
    f = BoundedFunction(rng.uniform(-1, 1, 20) + 0.5j * rng.uniform(-1, 1, 20), 2)
    alphas, c = grid_spectrum(f)
    assert len(alphas) == 80
    np.testing.assert_allclose(c, fourier_coefficients(f, alphas), atol=1e-9)
    with pytest.raises(ValueError):
        grid_spectrum(f, 20)


def test_spectrum_csv(tmp_path, rng):
    f = BoundedFunction(rng.uniform(-1, 1, 8))
    a, c = grid_spectrum(f)
    write_spectrum(a, c, tmp_path / "s.csv")
    rows = (tmp_path / "s.csv").read_text().splitlines()
    assert rows[0] == "alpha,re,im,modulus" and len(rows) == 33


def test_fejer_weights_exact():
    k = fejer_kernel(2)
    assert k.exact_weights() == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
    for H in (1, 2, 7.5, 10, 50):
        assert sum(fejer_kernel(H).exact_weights()) == 1
    assert k(0) == 0.5 and k(5) == 0.0


@pytest.mark.parametrize("H,q", [(2, 1), (10, 3), (50, 1)])
def test_smoothing_is_lipschitz(rng, H, q):
    f = BoundedFunction(rng.choice([-1.0, 1.0], 2000))
    phi = smooth_along(f, q, H)
    assert lipschitz_constant_along(phi, q, 20) <= 2 / math.floor(H) + 1e-12


def test_smooth_along_direct(rng):
    f = BoundedFunction(rng.uniform(-1, 1, 30))
    phi = smooth_along(f, 2, 3)
    k = fejer_kernel(3)
    direct = [sum(w * f(x + 2 * h) for h, w in zip(k.offsets, k.weights)) for x in range(1, 31)]
    np.testing.assert_allclose(phi.values, direct, atol=1e-12)


def test_weyl_sum_quarter_frozen():
    # y^2/4 mod 1 is 0 for even y, 1/4 for odd y: 32 + 32 i over y <= 64
    S = quadratic_weyl_sum(Progression(0, 1, 64), 4096, Fraction(1, 4))
    assert S == pytest.approx(32 + 32j, abs=1e-9)
    assert abs(S) == pytest.approx(32 * math.sqrt(2))
    assert quadratic_weyl_sum(Progression(0, 1, 64), 4096, 0.25) == pytest.approx(32 + 32j, abs=1e-9)


@given(st.integers(1, 40), st.integers(1, 5), st.integers(2, 2000), st.fractions(0, 1, max_denominator=500))
def test_weyl_sum_direct(a0, step, N, alpha):
    P = Progression(a0 - step, step, 50)
    ys = [y for y in P.elements().tolist() if 1 <= y <= math.isqrt(N)]
    direct = sum(np.exp(2j * np.pi * float((alpha * y * y) % 1)) for y in ys)
    assert quadratic_weyl_sum(P, N, alpha) == pytest.approx(direct, abs=1e-9)


def test_rational_approximation_frozen():
    assert rational_approximation(Fraction(1, 3), 10) == (3, 0.0)
    q, d = rational_approximation(0.5 + 1e-6, 10)
    assert q == 2 and d == pytest.approx(2e-6)
    assert rational_approximation((math.sqrt(5) - 1) / 2, 100)[0] == 89


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 3000))
def test_rational_approximation_is_optimal(alpha, Q):
    q, d = rational_approximation(alpha, Q)
    assert 1 <= q <= Q and d <= 1 / (Q + 1) + 1e-15
    a = Fraction(alpha)
    best = min(abs(a * k - round(a * k)) for k in range(1, Q + 1))
    assert d == pytest.approx(float(best), abs=1e-12)


def test_weyl_finder_rational_hypothesis_fails_and_holds():
    r = weyl_frequency_finder(Progression(0, 1, 64), 4096, Fraction(1, 4), 0.5)
    assert r.hypothesis_holds and r.q_prime == 4 and r.distance == 0.0
    r = weyl_frequency_finder(Progression(0, 1, 64), 4096, (math.sqrt(5) - 1) / 2, 0.5)
    assert not r.hypothesis_holds and r.q_prime is None
    with pytest.raises(ValueError):
        weyl_frequency_finder(Progression(0, 1, 4), 16, 0.1, 0)


def test_sixth_moment_frozen_and_naive():
    assert sixth_moment_squares(1) == 1
    assert sixth_moment_squares(2) == 20
    for N in (3, 5, 8):
        assert sixth_moment_squares(N) == naive_sixth_moment(N)


def test_major_arc_planted_and_trivial():
    N = 4096
    p = CountingParams(1, N)
    one = BoundedFunction.constant(N)
    x = np.arange(1, N + 1)
    even = BoundedFunction((x % 2 == 0).astype(float))
    w, diag = major_arc_witness(p, one, one, even, 0.25)
    assert w.alpha.value == Fraction(1, 2) and w.coefficient_modulus == pytest.approx(N / 2)
    assert w.q == 2 and w.qalpha_distance == 0
    w, _ = major_arc_witness(p, one, one, one, 0.25)
    assert w.alpha.value == 0 and w.coefficient_modulus == pytest.approx(N)


def test_major_arc_declines_small_operator(rng):
    N = 1024
    h = BoundedFunction(rng.choice([-1.0, 1.0], N))
    one = BoundedFunction.constant(N)
    w, diag = major_arc_witness(CountingParams(1, N), one, one, h, 0.1)
    assert w is None and diag["reason"] == "counting operator below delta"
    with pytest.raises(ValueError):
        major_arc_witness(CountingParams(2, N), one, one, h, 0.1)

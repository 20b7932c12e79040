"""Fourier analysis on [N]: coefficients, Fejér smoothing, quadratic Weyl
sums, rational approximation and the major-arc witness search."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .core import BoundedFunction, Progression, lp_norm
from .counting import CountingParams, count_operator
from .cutnorm import dual_function


@dataclass(frozen=True)
class Frequency:
    """A point of R/Z.  Stores an exact ``Fraction`` when built from one."""

    value: object = 0.0

    def __post_init__(self):
        v = self.value
        if isinstance(v, (Fraction, int)):
            v = Fraction(v) % 1
        else:
            v = float(v) % 1.0
            if v == 1.0:
                v = 0.0
        object.__setattr__(self, "value", v)

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def __float__(self):
        return float(self.value)

    def scaled(self, n: int) -> "Frequency":
        if self.exact:
            return Frequency(self.value * n)
        t = kernels.frac_mul(float(self.value), abs(int(n)))
        return Frequency(t if n >= 0 else -t)

    def distance_to_integer(self) -> float:
        v = self.value
        return float(min(v, 1 - v))

    def distance_of_multiple(self, n: int) -> float:
        """``||n * alpha||``, exact for rational frequencies."""
        return self.scaled(n).distance_to_integer()

    def __neg__(self):
        return Frequency(-self.value)


def _freq(alpha) -> Frequency:
    return alpha if isinstance(alpha, Frequency) else Frequency(alpha)


def fourier_coefficient(f: BoundedFunction, alpha) -> complex:
    """``sum_x f(x) e(alpha x)``."""
    a = float(_freq(alpha))
    return complex(fourier_coefficients(f, np.array([a]))[0])


def fourier_coefficients(f: BoundedFunction, alphas) -> np.ndarray:
    alphas = np.asarray([float(_freq(a)) if isinstance(a, Frequency) else a for a in alphas], dtype=np.float64)
    pos = np.arange(1, f.N + 1, dtype=np.int64)
    return kernels.fourier_sums(np.ascontiguousarray(f.values), pos, alphas)


def grid_spectrum(f: BoundedFunction, L: int | None = None):
    """``f^(k/L)`` for ``k = 0..L-1`` by FFT.  ``L`` must exceed ``N``."""
    L = 4 * f.N if L is None else L
    if L <= f.N:
        raise ValueError("grid size must exceed N to avoid aliasing")
    a = np.zeros(L, dtype=np.complex128)
    a[1 : f.N + 1] = f.values
    return np.arange(L) / L, L * np.fft.ifft(a)


def write_spectrum(alphas, coeffs, path) -> None:
    with open(path, "w") as fh:
        fh.write("alpha,re,im,modulus\n")
        for a, c in zip(np.asarray(alphas).tolist(), np.asarray(coeffs).tolist()):
            fh.write(f"{a!r},{c.real!r},{c.imag!r},{abs(c)!r}\n")


# ---------------------------------------------------------------------------
# Fejér kernel and smoothing along q.Z


@dataclass(frozen=True)
class FejerKernel:
    H: float
    offsets: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def width(self) -> int:
        return math.floor(self.H)

    def exact_weights(self):
        K = self.width
        return [Fraction(K - abs(h), K * K) for h in self.offsets.tolist()]

    def __call__(self, h: int) -> float:
        K = self.width
        return max(0.0, (1 - abs(h) / K) / K)


def fejer_kernel(H: float) -> FejerKernel:
    """``mu_H(h) = (1/K)(1 - |h|/K)_+`` with ``K = floor(H)``; a probability measure."""
    if H < 1:
        raise ValueError("H must be >= 1")
    K = math.floor(H)
    h = np.arange(-(K - 1), K, dtype=np.int64)
    w = (K - np.abs(h)) / (K * K)
    return FejerKernel(float(H), h, w)


def smooth_along(f: BoundedFunction, q: int, H: float) -> BoundedFunction:
    """``phi(x) = sum_h mu_H(h) f(x + q h)``, with f read as zero off [N]."""
    if q < 1:
        raise ValueError("q must be positive")
    ker = fejer_kernel(H)
    n = f.N
    v = f.values
    out = np.zeros(n, dtype=np.complex128)
    for h, w in zip(ker.offsets.tolist(), ker.weights.tolist()):
        s = q * h
        lo, hi = max(0, -s), min(n, n - s)
        if hi > lo:
            out[lo:hi] += w * v[lo + s : hi + s]
    return BoundedFunction(out, f.bound)


def lipschitz_constant_along(phi: BoundedFunction, q: int, window: int) -> float:
    """Empirical ``sup |phi(x + q y) - phi(x)| / |y|`` over ``1 <= |y| <= window`` inside [N]."""
    if window < 1:
        raise ValueError("window must be >= 1")
    v = phi.values
    n = phi.N
    best = 0.0
    for y in range(1, window + 1):
        s = q * y
        if s >= n:
            break
        d = np.abs(v[s:] - v[:-s]).max() / y
        best = max(best, float(d))
    return best


# ---------------------------------------------------------------------------
# quadratic Weyl sums and Diophantine approximation


def _progression_in_root(P: Progression, N: int) -> np.ndarray:
    K = math.isqrt(N)
    el = P.elements()
    return el[(el >= 1) & (el <= K)]


def quadratic_weyl_sum(P: Progression, N: int, alpha) -> complex:
    """``S_P(alpha) = sum over y in P with 1 <= y <= isqrt(N) of e(alpha y^2)``."""
    a = _freq(alpha)
    ys = _progression_in_root(P, N)
    if ys.size == 0:
        return 0j
    if a.exact and a.value.denominator < 2**20:
        b = a.value.denominator
        r = (a.value.numerator * (ys % b) ** 2) % b
        return complex(np.exp(2j * np.pi * r / b).sum())
    vals = np.ones(ys.size, dtype=np.complex128)
    return complex(kernels.fourier_sums(vals, ys * ys, np.array([float(a)]))[0])


def _convergent_denominators(x: Fraction):
    """Continued-fraction convergents ``p/q`` of ``x`` in [0, 1)."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        a = x.numerator // x.denominator
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def _scan_best(alpha: Frequency, Q: int):
    qs = np.arange(1, Q + 1, dtype=np.int64)
    if alpha.exact:
        num, den = alpha.value.numerator, alpha.value.denominator
        r = (qs * num) % den
        d = np.minimum(r, den - r) / den
    else:
        t = kernels.frac_mul_array(float(alpha), qs)
        d = np.minimum(t, 1 - t)
    i = int(np.argmin(d))
    return int(qs[i]), float(d[i])


def rational_approximation(alpha, Q: int, scan_limit: int = 10**6):
    """Smallest ``q <= Q`` minimising ``||q alpha||``; returns ``(q, distance)``.

    The largest convergent denominator not exceeding ``Q`` is the minimiser;
    for ``Q <= scan_limit`` a direct scan double-checks it and wins if the
    floating-point distance disagrees.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    a = _freq(alpha)
    x = a.value if a.exact else Fraction(a.value)
    best_q = 1
    for _, qk in _convergent_denominators(x):
        if qk > Q:
            break
        if qk >= 1:
            best_q = qk
    best_d = a.distance_of_multiple(best_q)
    if Q <= scan_limit:
        sq, sd = _scan_best(a, Q)
        if sd < best_d - 1e-15:
            best_q, best_d = sq, sd
    return best_q, best_d


@dataclass
class WeylResult:
    q_prime: int | None
    distance: float | None
    ratio: float
    hypothesis_holds: bool
    tolerance: float
    search_limit: int


def weyl_frequency_finder(P: Progression, N: int, alpha, delta: float, C: float = 3.0) -> WeylResult:
    """If ``|S_P(alpha)| >= delta |P|``, find the least ``q' <= delta^-C`` with
    ``||q' s^2 alpha|| <= delta^-C |P|^-2`` (``s`` the common difference)."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    a = _freq(alpha)
    size = _progression_in_root(P, N).size
    S = quadratic_weyl_sum(P, N, a)
    ratio = abs(S) / size if size else 0.0
    limit = int(math.floor(delta ** (-C) + 1e-9))
    tol = delta ** (-C) / size**2 if size else math.inf
    holds = size > 0 and ratio >= delta - 1e-12
    if not holds:
        return WeylResult(None, None, ratio, False, tol, limit)
    base = P.step * P.step
    for qp in range(1, max(1, limit) + 1):
        d = a.distance_of_multiple(qp * base)
        if d <= tol:
            return WeylResult(qp, d, ratio, True, tol, limit)
    return WeylResult(None, None, ratio, True, tol, limit)


def sixth_moment_squares(N: int) -> int:
    """Ordered solutions in [N]^6 of ``x1^2+x2^2+x3^2 = x4^2+x5^2+x6^2``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    r3 = kernels.r3_counts(N).astype(object)
    return int(np.dot(r3, r3))


# ---------------------------------------------------------------------------
# major-arc witness


@dataclass(frozen=True)
class MajorArcConfig:
    C: float = 3.0
    c0: float = 1.0 / 8
    grid_factor: int = 4
    max_denominator: int = 1024
    smoothing_moduli: tuple = (1, 2, 3, 4)
    smoothing_fractions: tuple = (8, 4, 2)


@dataclass(frozen=True)
class MajorArcWitness:
    alpha: Frequency
    q: int
    qalpha_distance: float
    coefficient_modulus: float
    threshold: float


def _farey(b_max: int):
    for b in range(1, b_max + 1):
        for a in range(b):
            if math.gcd(a, b) == 1:
                yield Fraction(a, b)


def _coeffs_at_rationals(values, positions, fracs, sign):
    """``sum_i values[i] e(sign * a * positions[i] / b)`` for each ``a/b`` by folding mod b."""
    out = {}
    by_den = {}
    for fr in fracs:
        by_den.setdefault(fr.denominator, []).append(fr)
    for b, group in by_den.items():
        fold = np.zeros(b, dtype=np.complex128)
        np.add.at(fold, positions % b, values)
        spec = np.fft.fft(fold) if sign < 0 else b * np.fft.ifft(fold)
        for fr in group:
            out[fr] = spec[fr.numerator % b]
    return out


def major_arc_witness(p: CountingParams, f: BoundedFunction, g: BoundedFunction, h: BoundedFunction,
                      delta: float, config: MajorArcConfig | None = None):
    """Search for a frequency at which ``h`` has a large coefficient, following
    the dual function -> Lipschitz smoothing -> progression pigeonhole ->
    major arc chain.  Returns ``(witness or None, diagnostics)``.
    """
    cfg = config or MajorArcConfig()
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if p.q != 1:
        raise ValueError("the major-arc pipeline uses q = 1")
    N, M = p.N, p.M
    diag = {"N": N, "M": M, "delta": delta}
    lam = count_operator(p, f, g, h)
    diag["lambda_abs"] = abs(lam)
    if abs(lam) < delta:
        diag["reason"] = "counting operator below delta"
        return None, diag

    # dual of the middle slot; Lambda = E_x g(x) F(x)
    F = dual_function(p, 1, f, h)
    best = None
    for s in cfg.smoothing_moduli:
        for frac in cfg.smoothing_fractions:
            H = max(1, M // frac)
            phi = smooth_along(F.conj(), s, H)
            score = abs(np.dot(F.values, phi.values)) / N
            if best is None or score > best[0] + 1e-12:
                best = (score, s, H, phi)
    _, step, H, phi = best
    diag.update(smoothing_modulus=step, smoothing_width=H, smoothing_correlation=best[0])

    # pigeonhole over progressions of difference `step` and length H inside [sqrt N]
    K = math.isqrt(N)
    hv = h.values
    fv = f.values
    best_P = None
    for r in range(1, min(step, K) + 1):
        ys_all = np.arange(r, K + 1, step)
        for j in range(0, ys_all.size, H):
            ys = ys_all[j : j + H]
            yP = int(ys[0])
            fP = fv * np.concatenate([phi.values[yP:], np.zeros(min(yP, N), dtype=np.complex128)])[:N]
            Hsum = np.zeros(N, dtype=np.complex128)
            for y in ys.tolist():
                if y * y < N:
                    Hsum[: N - y * y] += hv[y * y :]
            score = abs(np.dot(fP, Hsum))
            if best_P is None or score > best_P[0] + 1e-9:
                best_P = (score, ys)
    ys = best_P[1]
    P = Progression(int(ys[0]) - step, step, int(ys.size))
    diag.update(progression=[P.a, P.step, P.length], progression_score=best_P[0] / N ** 1.5)

    # candidate frequencies: fine grid plus Farey fractions
    eta = cfg.c0 * delta**cfg.C
    b_max = min(cfg.max_denominator, int(math.ceil(delta ** (-cfg.C) - 1e-9)))
    L = cfg.grid_factor * N
    cands = {Fraction(k, L) for k in range(L)}
    cands.update(_farey(b_max))
    cands = sorted(cands)
    hpos = np.arange(1, N + 1, dtype=np.int64)
    h_minus = _coeffs_at_rationals(hv, hpos, cands, -1)
    S = _coeffs_at_rationals(np.ones(ys.size, dtype=np.complex128), ys.astype(np.int64) ** 2, cands, +1)
    arc_floor = eta * math.sqrt(N)
    major = [fr for fr in cands if abs(S[fr]) >= arc_floor]
    diag.update(eta=eta, candidates=len(cands), major_arc_size=len(major), farey_max_denominator=b_max)
    if not major:
        diag["reason"] = "no candidate frequency on the major arcs"
        return None, diag
    mods = np.array([abs(h_minus[fr]) for fr in major])
    top = float(mods.max())
    tie = 1e-9 * max(1.0, lp_norm(h, 1))
    tied = [fr for fr, m in zip(major, mods.tolist()) if m >= top - tie]
    # equal weight: a nonzero frequency is preferred over alpha = 0, then smallest alpha
    tied.sort(key=lambda fr: (fr == 0, fr))
    alpha = Frequency(tied[0])
    Q = max(1, int(math.ceil(delta ** (-cfg.C) - 1e-9)))
    q, dist = rational_approximation(alpha, Q)
    diag["ties"] = [str(fr) for fr in tied[:8]]
    return MajorArcWitness(alpha, q, dist, top, delta), diag

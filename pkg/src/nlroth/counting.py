"""The counting operator and exact configuration counts.

A configuration of modulus ``q`` is a triple ``x, x + y, x + q*y**2`` with
``y != 0``.  The operator only sees ``y in [M]`` with ``M = isqrt(N // q)``;
:func:`is_configuration_free` looks at every ``y`` that fits inside ``[N]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import BoundedFunction, IntegerSet, lp_norm


@dataclass(frozen=True)
class CountingParams:
    q: int
    N: int

    def __post_init__(self):
        if self.q < 1 or self.N < 1:
            raise ValueError("q and N must be positive integers")
        if self.q > self.N:
            raise ValueError(f"need q <= N (got q={self.q}, N={self.N})")

    @property
    def M(self) -> int:
        return math.isqrt(self.N // self.q)

    @property
    def y_full(self) -> int:
        """Largest ``y`` with ``q*y**2 <= N - 1``, i.e. a configuration can still fit."""
        return math.isqrt((self.N - 1) // self.q)


def _shifts(q: int, ys) -> np.ndarray:
    ys = np.asarray(ys, dtype=np.int64)
    return np.stack([ys, q * ys * ys], axis=1) if ys.size else np.zeros((0, 2), np.int64)


def _is_indicator(v: np.ndarray) -> bool:
    return not np.any(v.imag) and bool(np.all((v.real == 0) | (v.real == 1)))


def count_operator(p: CountingParams, f0, f1, f2) -> complex:
    """``E_{x in [N]} E_{y in [M]} f0(x) f1(x+y) f2(x+q y^2)``.

    0/1-valued inputs go through the exact integer path; anything else
    through the complex kernel.
    """
    N, M = p.N, p.M
    vals = [f.padded(N) for f in (f0, f1, f2)]
    sh = _shifts(p.q, np.arange(1, M + 1))
    if all(_is_indicator(v) for v in vals):
        bits = [v.real.astype(bool) for v in vals]
        total = _and_count(bits, sh)
        return complex(total / (N * M))
    per_y = kernels.shifted_product_sums(np.stack(vals), sh)
    return complex(np.sum(per_y) / (N * M))


def _and_count(bits, shifts) -> int:
    b0, b1, b2 = bits
    if b0 is b1 is b2 or (np.array_equal(b0, b1) and np.array_equal(b1, b2)):
        return int(kernels.shift_counts(b0.astype(np.uint8), shifts).sum())
    # distinct indicators: slice path, still exact
    n = b0.shape[0]
    total = 0
    for y1, y2 in shifts.tolist():
        hi = n - max(y1, y2)
        if hi > 0:
            total += int(np.count_nonzero(b0[:hi] & b1[y1 : y1 + hi] & b2[y2 : y2 + hi]))
    return total


def _per_y_counts(A: IntegerSet, q: int, ys) -> np.ndarray:
    return kernels.shift_counts(A.mask.astype(np.uint8), _shifts(q, ys))


def count_configurations(A: IntegerSet, p: CountingParams) -> int:
    """Number of pairs ``(x, y)``, ``y in [M]``, with ``x, x+y, x+q y^2`` all in A."""
    if A.N != p.N:
        raise ValueError("set length must equal N")
    return int(_per_y_counts(A, p.q, np.arange(1, p.M + 1)).sum())


def configuration_counts(A: IntegerSet, q: int) -> dict:
    """Exact counts over every ``y`` that fits in ``[N]``, split by the sign of ``y``."""
    p = CountingParams(q, A.N)
    ys = np.arange(1, p.y_full + 1)
    pos = int(_per_y_counts(A, q, ys).sum())
    neg = int(_per_y_counts(A, q, -ys).sum()) if ys.size else 0
    return {"positive": pos, "negative": neg, "y_max": p.y_full}


def find_configuration(A: IntegerSet, q: int, signs: str = "both"):
    """First configuration ``(x, y)`` (smallest ``|y|``, then ``y > 0``, then ``x``), or None."""
    p = CountingParams(q, A.N)
    ys = np.arange(1, p.y_full + 1)
    sign_list = (1, -1) if signs == "both" else (1,)
    for t in ys.tolist():
        for s in sign_list:
            y = s * t
            if _per_y_counts(A, q, [y])[0]:
                m = A.mask
                n = A.N
                lo, hi = max(0, -y), min(n, n - y, n - q * t * t)
                hit = m[lo:hi] & m[lo + y : hi + y] & m[lo + q * t * t : hi + q * t * t]
                return int(lo + np.argmax(hit) + 1), int(y)
    return None


def is_configuration_free(A: IntegerSet, p: CountingParams, signs: str = "both") -> bool:
    """True iff A has no ``x, x+y, x+q y^2`` inside [N] for any admissible ``y != 0``.

    ``signs="positive"`` restricts to ``y >= 1``.
    """
    if A.N != p.N:
        raise ValueError("set length must equal N")
    if signs not in ("both", "positive"):
        raise ValueError("signs must be 'both' or 'positive'")
    c = configuration_counts(A, p.q)
    return c["positive"] == 0 and (signs == "positive" or c["negative"] == 0)


def l1_control_bound(p: CountingParams, f0, f1, f2, i: int) -> float:
    """``N^-1 ||f_i||_1 prod_{j != i} ||f_j||_inf``; dominates ``|count_operator|``."""
    fs = (f0, f1, f2)
    if i not in (0, 1, 2):
        raise ValueError("slot index must be 0, 1 or 2")
    N = p.N
    trimmed = [BoundedFunction.from_values(f.padded(N)) for f in fs]
    out = lp_norm(trimmed[i], 1) / N
    for j in range(3):
        if j != i:
            out *= lp_norm(trimmed[j], math.inf)
    return out


# ---------------------------------------------------------------------------
# longer polynomial configurations


@dataclass(frozen=True)
class PolynomialFamily:
    """Integer polynomials without constant term; ``coeffs[i][k]`` multiplies ``y**(k+1)``."""

    coeffs: tuple

    def __post_init__(self):
        polys = tuple(tuple(int(c) for c in poly) for poly in self.coeffs)
        if not polys:
            raise ValueError("need at least one polynomial")
        trimmed = []
        for poly in polys:
            while poly and poly[-1] == 0:
                poly = poly[:-1]
            if not poly:
                raise ValueError("zero polynomial in family")
            trimmed.append(poly)
        degs = [len(t) for t in trimmed]
        if any(b <= a for a, b in zip(degs, degs[1:])):
            raise ValueError(f"degrees must strictly increase, got {degs}")
        object.__setattr__(self, "coeffs", tuple(trimmed))

    @classmethod
    def monomials(cls, *degrees):
        return cls(tuple((0,) * (d - 1) + (1,) for d in degrees))

    @property
    def degrees(self):
        return [len(c) for c in self.coeffs]

    def evaluate(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        rows = []
        for poly in self.coeffs:
            acc = np.zeros_like(y)
            for k, c in enumerate(poly, start=1):
                acc = acc + c * y**k
            rows.append(acc)
        return np.stack(rows, axis=1)


def integer_root(N: int, d: int) -> int:
    """``floor(N ** (1/d))`` computed exactly."""
    r = int(round(N ** (1.0 / d)))
    while r**d > N:
        r -= 1
    while (r + 1) ** d <= N:
        r += 1
    return r


def polynomial_counting_operator(N: int, fam: PolynomialFamily, *fs) -> complex:
    """``E_{x in [N]} E_{y in [N^(1/deg P_m)]} f0(x) prod_i f_i(x + P_i(y))``."""
    m = len(fam.coeffs)
    if len(fs) != m + 1:
        raise ValueError(f"need {m + 1} functions for a family of {m} polynomials")
    Y = integer_root(N, fam.degrees[-1])
    vals = np.stack([f.padded(N) for f in fs])
    sh = fam.evaluate(np.arange(1, Y + 1))
    # rows whose shifts leave [N] entirely contribute nothing
    sh = sh[np.all(np.abs(sh) < N, axis=1)] if sh.size else sh
    if all(_is_indicator(v) for v in vals) and all(np.array_equal(vals[0], v) for v in vals[1:]):
        total = int(kernels.shift_counts(vals[0].real.astype(np.uint8), sh).sum()) if sh.size else 0
        return complex(total / (N * Y))
    per_y = kernels.shifted_product_sums(vals, sh) if sh.size else np.zeros(1)
    return complex(np.sum(per_y) / (N * Y))

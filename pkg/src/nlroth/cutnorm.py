"""Cut norm and partial cut norm of the counting operator.

``||f||_{q,N}`` is the largest ``|Lambda_{q,N}|`` obtainable with ``f`` in one
slot and arbitrary 1-bounded functions on [N] in the other two; the partial
version only lets ``f`` sit in slot 0 or 1.  Estimates here are lower bounds
from alternating maximisation, certified by stored witnesses, plus an
exhaustive oracle for tiny ``N``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import BoundedFunction, lp_norm
from .counting import CountingParams, count_operator
from .factors import Factor, SimpleLocal, _project_values, join_factors, simple_local_factor

PARTIAL = (0, 1)
FULL = (0, 1, 2)
EXACT_MAX_N = 14


def _positions(slots):
    if slots in ("partial", PARTIAL):
        return PARTIAL
    if slots in ("full", FULL):
        return FULL
    raise ValueError("slots must be 'partial' or 'full'")


def _free(slot):
    return tuple(j for j in range(3) if j != slot)


def _dual_shifts(q, M, slot):
    y = np.arange(1, M + 1, dtype=np.int64)
    sq = q * y * y
    if slot == 0:
        return y, sq
    if slot == 1:
        return -y, sq - y
    if slot == 2:
        return -sq, y - sq
    raise ValueError("slot must be 0, 1 or 2")


def dual_function(p: CountingParams, slot: int, g_a: BoundedFunction, g_b: BoundedFunction) -> BoundedFunction:
    """``F`` with ``Lambda(...) = E_{x in [N]} g(x) F(x)`` for ``g`` placed in ``slot``.

    ``g_a, g_b`` fill the other two slots in increasing order.  For slot 2,
    ``F(u) = E_{y in [M]} g_a(u - q y^2) g_b(u - q y^2 + y)``.
    """
    sa, sb = _dual_shifts(p.q, p.M, slot)
    N = p.N
    F = kernels.pair_shift_sum(g_a.padded(N), g_b.padded(N), sa, sb) / p.M
    return BoundedFunction(F, g_a.bound * g_b.bound)


def _arrange(slot, f, a, b):
    out = [None, None, None]
    out[slot] = f
    i, j = _free(slot)
    out[i], out[j] = a, b
    return out


def _phase(F: np.ndarray, real: bool) -> np.ndarray:
    if real:
        return np.where(F.real >= 0, 1.0, -1.0).astype(np.complex128)
    mod = np.abs(F)
    out = np.ones_like(F)
    nz = mod > 0
    out[nz] = np.conj(F[nz]) / mod[nz]
    return out


@dataclass
class CutNormEstimate:
    lower: float
    upper: float
    slot: int | None
    g_a: BoundedFunction | None = field(default=None, repr=False)
    g_b: BoundedFunction | None = field(default=None, repr=False)
    exact: bool = False
    restarts: int = 0
    iterations: int = 0
    per_slot: dict = field(default_factory=dict)

    def replay(self, p: CountingParams, f: BoundedFunction) -> float:
        if self.slot is None:
            return 0.0
        return abs(count_operator(p, *_arrange(self.slot, f, self.g_a, self.g_b)))


def _upper(f: BoundedFunction, N: int) -> float:
    v = BoundedFunction.from_values(f.padded(N))
    return min(lp_norm(v, 1) / N, lp_norm(v, math.inf))


def cut_norm_lower(p: CountingParams, f: BoundedFunction, slots="partial", restarts: int = 8,
                   iterations: int = 50, seed: int = 0, tol: float = 1e-10,
                   real: bool | None = None) -> CutNormEstimate:
    """Alternating maximisation over the two free slots.

    With ``f`` and one companion fixed, the best remaining companion is the
    conjugate phase of its dual function (the sign, for real ``f``), so each
    half-step can only increase ``|Lambda|``.  Restart 0 starts from the
    constant 1; the rest from seeded random phases.
    """
    if restarts < 1 or iterations < 1:
        raise ValueError("restarts and iterations must be >= 1")
    N = p.N
    fv = BoundedFunction(f.padded(N), f.bound)
    real = fv.is_real if real is None else real
    upper = _upper(fv, N)
    rng = np.random.default_rng(seed)
    best = CutNormEstimate(0.0, upper, None, restarts=restarts)
    if not np.any(fv.values):
        best.slot = _positions(slots)[0]
        best.g_a = best.g_b = BoundedFunction.constant(N)
        return best
    total_iters = 0
    for slot in _positions(slots):
        a_slot, b_slot = _free(slot)
        slot_best = 0.0
        for r in range(restarts):
            if r == 0:
                ga = np.ones(N, dtype=np.complex128)
            elif real:
                ga = rng.choice([-1.0, 1.0], size=N).astype(np.complex128)
            else:
                ga = np.exp(2j * np.pi * rng.random(N))
            ga_f = BoundedFunction(ga)
            prev = -1.0
            val = 0.0
            for it in range(iterations):
                total_iters += 1
                # update the b-companion against the current a-companion
                Fb = dual_function(p, b_slot, *_pair_for(b_slot, slot, fv, ga_f))
                gb_f = BoundedFunction(_phase(Fb.values, real))
                Fa = dual_function(p, a_slot, *_pair_for(a_slot, slot, fv, gb_f))
                ga_f = BoundedFunction(_phase(Fa.values, real))
                val = float(np.abs(np.dot(ga_f.values, Fa.values)) / N)
                if val - prev < tol:
                    break
                prev = val
            if val > slot_best:
                slot_best = val
            if val > best.lower + 1e-15:
                best = CutNormEstimate(val, upper, slot, ga_f, gb_f, restarts=restarts)
        best.per_slot[slot] = slot_best
    per_slot = best.per_slot
    # the certificate is the witness itself: report the replayed value
    best.lower = best.replay(p, fv)
    best.per_slot = per_slot
    best.iterations = total_iters
    return best


def _pair_for(target, f_slot, f, g):
    """The two functions occupying the slots other than ``target``, in slot order."""
    others = [s for s in range(3) if s != target]
    return tuple(f if s == f_slot else g for s in others)


def bilinear_matrix(p: CountingParams, f: BoundedFunction, slot: int) -> np.ndarray:
    """``K`` with ``Lambda = g_a^T K g_b`` when ``f`` sits in ``slot``; built by direct enumeration."""
    N, M, q = p.N, p.M, p.q
    fv = f.padded(N)
    a_slot, b_slot = _free(slot)
    K = np.zeros((N, N), dtype=np.complex128)
    for y in range(1, M + 1):
        for x in range(1, N + 1):
            pts = (x, x + y, x + q * y * y)
            if pts[1] > N or pts[2] > N:
                continue
            K[pts[a_slot] - 1, pts[b_slot] - 1] += fv[pts[slot] - 1]
    return K / (N * M)


def cut_norm_exact_small(p: CountingParams, f: BoundedFunction, slots="partial") -> float:
    """Exact supremum over real companions in [-1, 1]^N for real ``f``, ``N <= 14``.

    Bilinearity puts the maximum on sign vectors; for each ``g_a`` the best
    ``g_b`` is the sign of ``g_a^T K``, so only ``g_a`` is enumerated.
    """
    N = p.N
    if N > EXACT_MAX_N:
        raise ValueError(f"exhaustive oracle limited to N <= {EXACT_MAX_N}")
    if not f.is_real:
        raise ValueError("exhaustive oracle needs a real-valued function")
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=N - 1)))
    signs = np.hstack([np.ones((signs.shape[0], 1)), signs]) if N > 1 else np.ones((1, 1))
    best = 0.0
    for slot in _positions(slots):
        K = bilinear_matrix(p, f, slot).real
        best = max(best, float(np.abs(signs @ K).sum(axis=1).max()))
    return best


# ---------------------------------------------------------------------------
# inverse search: correlation with products of two local functions


@dataclass(frozen=True)
class SearchGrid:
    resolutions: tuple
    moduli: tuple
    phases: str | tuple = "half"

    @classmethod
    def default(cls, N: int, q: int = 1):
        # ceil(sqrt(N / q)): least b with q b^2 >= N
        base = math.isqrt(N // q)
        while q * base * base < N:
            base += 1
        res = sorted({max(1, math.ceil(base * 2.0**k)) for k in range(-1, 4)})
        return cls(tuple(res), tuple(range(1, 13)))

    def signatures(self, q: int):
        out = []
        for M in self.resolutions:
            phases = (0, M // 2) if self.phases == "half" else tuple(self.phases)
            for qq in self.moduli:
                for ph in sorted(set(phases)):
                    if 0 <= ph < M:
                        out.append(SimpleLocal(M, q * qq, ph))
        return out


@dataclass
class CorrelationWitness:
    first: SimpleLocal
    second: SimpleLocal
    factor: Factor = field(repr=False)
    psi: BoundedFunction = field(repr=False)
    correlation: float = 0.0
    candidates: int = 0

    @property
    def resolutions(self):
        return self.first.M, self.second.M

    @property
    def moduli(self):
        return self.first.q, self.second.q

    def replay(self, f: BoundedFunction) -> float:
        return float(abs(np.dot(f.values, self.psi.values)))


def inverse_correlation_search(f: BoundedFunction, q: int = 1, grid: SearchGrid | None = None,
                               threshold: float = 0.0):
    """Best ``|sum_x f(x) phi1(x) phi2(x)|`` over pairs of simple local factors.

    For a fixed pair the optimum over 1-bounded functions measurable for the
    join is the conjugate phase of ``Pi f``, worth exactly ``||Pi f||_1``.
    Returns ``None`` when the best value is below ``threshold``.
    """
    N = f.N
    grid = grid or SearchGrid.default(N, q)
    sigs = grid.signatures(q)
    x = np.arange(1, N + 1, dtype=np.int64)
    v = np.ascontiguousarray(f.values)
    intervals = {(s.M, s.phase): s.interval_index(x) for s in sigs}
    tie = 1e-9 * max(1.0, lp_norm(f, 1))
    best_val, best_pair = -1.0, None
    count = 0
    order = sorted(range(len(sigs)), key=lambda i: (sigs[i].M, sigs[i].q, sigs[i].phase))
    for ii, i in enumerate(order):
        for j in order[ii:]:
            a, b = sigs[i], sigs[j]
            L = a.q * b.q // math.gcd(a.q, b.q)
            val = kernels.join_abs_sum(intervals[a.M, a.phase], intervals[b.M, b.phase], L, v)
            count += 1
            if val > best_val + tie:
                best_val, best_pair = val, (a, b)
    if best_pair is None or best_val < threshold:
        return None
    a, b = best_pair
    B = join_factors([simple_local_factor(N, a.M, a.q, a.phase), simple_local_factor(N, b.M, b.q, b.phase)])
    psi = BoundedFunction(_phase(_project_values(v, B), real=False))
    w = CorrelationWitness(a, b, B, psi, 0.0, count)
    w.correlation = w.replay(f)
    return w

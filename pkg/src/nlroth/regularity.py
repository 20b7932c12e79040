"""Weak regularity by energy increment.

Start from the trivial factor.  While the cut-norm estimate of the residual
``f - Pi f`` exceeds ``delta``, search for a pair of local functions
correlating with the residual, join their factor in, and record the energy
``||Pi f||_2^2``, which strictly increases at each accepted step.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BoundedFunction
from .counting import CountingParams
from .cutnorm import CutNormEstimate, SearchGrid, cut_norm_lower, inverse_correlation_search
from .factors import Factor, _project_values, join_factors, project, trivial_factor

C2_DEFAULT = 1 / 64


def energy(f: BoundedFunction, B: Factor) -> float:
    """``||Pi_B f||_2^2``."""
    if f.N != B.N:
        raise ValueError("function and factor have different N")
    v = _project_values(f.values, B)
    return float(np.vdot(v, v).real)


@dataclass
class RegularityOutput:
    factor: Factor
    structured: BoundedFunction = field(repr=False)
    residual: BoundedFunction = field(repr=False)
    residual_estimate: CutNormEstimate = field(repr=False)
    energy_trace: list
    steps: int
    status: str
    correlations: list = field(default_factory=list)
    factors: list = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        B = self.factor
        return {
            "steps": self.steps,
            "status": self.status,
            "energies": self.energy_trace,
            "correlations": self.correlations,
            "residual_estimate": self.residual_estimate.lower,
            "d": B.dimension,
            "atoms": B.n_atoms,
        }


def _split(f: BoundedFunction, B: Factor):
    s = _project_values(f.values, B)
    r = f.values - s
    return BoundedFunction(s, f.bound), BoundedFunction(r, 2 * f.bound)


def weak_regularize(p: CountingParams, f: BoundedFunction, delta: float, max_dimension: int = 16,
                    grid: SearchGrid | None = None, c2: float = C2_DEFAULT, relax: bool = False,
                    slots="full", restarts: int = 8, iterations: int = 50, seed: int = 0) -> RegularityOutput:
    """Energy-increment loop; ``status`` says why it stopped.

    ``"regular"``: the residual estimate is at most ``delta``.
    ``"dimension_cap"``: one more join would exceed ``max_dimension``.
    ``"search_gap"``: the estimate is above ``delta`` but no pair of local
    functions reaches the acceptance threshold ``c2 delta^3 N``.

    ``f`` must take values in [0, 1] unless ``relax`` is set, in which case
    any 1-bounded ``f`` is accepted.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    v = f.values
    if not relax and (np.any(v.imag) or v.real.min() < 0 or v.real.max() > 1):
        raise ValueError("f must be [0,1]-valued (pass relax=True for 1-bounded f)")
    if f.N != p.N:
        raise ValueError("function length must equal N")
    N = p.N
    threshold = c2 * delta**3 * N
    B = trivial_factor(N)
    structured, residual = _split(f, B)
    trace = [energy(f, B)]
    history = [B]
    corrs = []
    status = "regular"
    while True:
        est = cut_norm_lower(p, residual, slots, restarts, iterations, seed + len(history))
        if est.lower <= delta:
            break
        if B.dimension + 2 > max_dimension:
            status = "dimension_cap"
            break
        w = inverse_correlation_search(residual, p.q, grid, threshold)
        if w is None:
            status = "search_gap"
            break
        B_next = join_factors([B, w.factor])
        e = energy(f, B_next)
        # the jump is ||Pi' r||_2^2 >= ||Pi' r||_1^2 / N >= correlation^2 / N
        if e - trace[-1] < w.correlation**2 / N * (1 - 1e-9):
            raise AssertionError("energy increment below its floor")
        B = B_next
        structured, residual = _split(f, B)
        trace.append(e)
        history.append(B)
        corrs.append(float(w.correlation))
    return RegularityOutput(B, structured, residual, est, trace, len(history) - 1, status, corrs, history)


def is_measurable(f: BoundedFunction, B: Factor, tol: float = 1e-12) -> bool:
    """True when projecting onto ``B`` leaves ``f`` unchanged."""
    return bool(np.max(np.abs(project(f, B).values - f.values)) <= tol * max(1.0, f.bound))

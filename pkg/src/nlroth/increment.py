"""Density increments, the iteration driver, extremal searches and the
quadratic-phase counterexample to linear control.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .core import BoundedFunction, IntegerSet, Progression, indicator
from .counting import CountingParams, find_configuration, is_configuration_free
from .cutnorm import SearchGrid
from .regularity import weak_regularize

C_DEFAULT = 0.01
# every lcm of these divides 12, so increments have step dividing 12 q
INCREMENT_MODULI = (1, 2, 3, 4, 6, 12)


class ConfigurationFound(ValueError):
    """The input set contains a configuration; ``witness`` is ``(x, y)``."""

    def __init__(self, witness, q):
        self.witness = witness
        super().__init__(f"set contains x={witness[0]} y={witness[1]} (q={q})")


@dataclass(frozen=True)
class IncrementResult:
    progression: Progression
    old_density: Fraction
    count: int
    c: float
    atom_id: int

    @property
    def exact_density(self) -> Fraction:
        return Fraction(self.count, self.progression.length)

    @property
    def new_density(self) -> float:
        return float(self.exact_density)

    def to_dict(self) -> dict:
        P = self.progression
        return {
            "a": P.a, "step": P.step, "length": P.length, "count": self.count,
            "old_density": float(self.old_density), "new_density": self.new_density,
            "c": self.c, "atom_id": self.atom_id,
        }


def increment_grid(N: int, min_length: int = 32) -> SearchGrid:
    """Coarse resolutions ``N/2, N/4, ...`` down to ``24 min_length``.

    The search itself prefers fine factors (they capture more of ``||f||_1``),
    whose atoms are too short to be useful progressions.  Two half-shifted
    intervals of length ``M`` meet in length ``M/2``, which is then split
    into up to 12 residue classes.
    """
    floor = 2 * max(INCREMENT_MODULI) * min_length
    res = []
    M = N // 2
    while M >= floor:
        res.append(M)
        M //= 2
    return SearchGrid(tuple(sorted(res)) or (max(1, N // 2),), INCREMENT_MODULI)


def find_density_increment(A: IntegerSet, q: int = 1, delta: float | None = None, c: float = C_DEFAULT,
                           reg_delta: float | None = None, max_dimension: int = 8, grid: SearchGrid | None = None,
                           min_length: int = 32, seed: int = 0):
    """Regularise ``1_A`` and return the largest atom where ``A`` has density ``>= (1+c) delta``.

    Returns ``(IncrementResult | None, diagnostics)``.  Densities are always
    recounted from ``A``; the projection only nominates candidate atoms.
    Ties between atoms of equal size go to the smaller first element.
    """
    N = A.N
    if q > N:
        return None, {"reason": "small_N", "N": N, "q": q}
    w = find_configuration(A, q)
    if w is not None:
        raise ConfigurationFound(w, q)
    dens = Fraction(A.cardinality, N)
    if delta is not None and abs(delta - float(dens)) > 1e-12:
        raise ValueError(f"delta={delta} does not match |A|/N={float(dens)}")
    diag = {"N": N, "q": q, "card": A.cardinality, "density": float(dens), "c": c}
    p = CountingParams(q, N)
    if A.cardinality <= 1 or N < 2 * min_length or p.M < 2:
        diag["reason"] = "small_N"
        return None, diag
    # a configuration-free set has cut norm of order delta^3, so regularise at that scale
    reg_delta = float(dens) ** 3 / 6 if reg_delta is None else reg_delta
    out = weak_regularize(p, indicator(A), reg_delta, max_dimension=max_dimension,
                          grid=grid or increment_grid(N, min_length), seed=seed)
    B = out.factor
    diag.update(regularity=out.status, steps=out.steps, atoms=B.n_atoms, d=B.dimension)
    target = (1 + Fraction(c)) * dens
    sizes = B.sizes()
    counts = np.bincount(B.atom_id, weights=A.mask.astype(np.float64), minlength=B.n_atoms).astype(np.int64)
    firsts = np.full(B.n_atoms, N, dtype=np.int64)
    np.minimum.at(firsts, B.atom_id, np.arange(N))
    in_S = out.structured.values.real >= float(target) - 1e-12
    diag["S_size"] = int(np.count_nonzero(in_S))
    best = None
    for k in np.unique(B.atom_id[in_S]).tolist():
        size, cnt = int(sizes[k]), int(counts[k])
        if size < min_length or Fraction(cnt, size) < target:
            continue
        key = (-size, int(firsts[k]))
        if best is None or key < best[0]:
            best = (key, k, cnt)
    if best is None:
        diag["reason"] = "no_atom_above_threshold" if diag["S_size"] else "S_empty"
        return None, diag
    _, k, cnt = best
    P = B.atom_progression(k)
    res = IncrementResult(P, dens, cnt, c, k)
    if A.count_in(P) != cnt or P.step % q or not P.within(N):
        raise AssertionError("increment bookkeeping mismatch")
    diag["reason"] = "success"
    return res, diag


@dataclass
class Stage:
    A: IntegerSet = field(repr=False)
    N: int
    q: int
    density: Fraction
    a: int | None = None
    step: int | None = None

    def to_dict(self) -> dict:
        return {
            "N": self.N, "q": self.q, "card": self.A.cardinality,
            "density": f"{self.density.numerator}/{self.density.denominator}",
            "a": self.a, "step": self.step,
        }


@dataclass
class IterationTrace:
    stages: list
    reason: str
    c: float
    stage_bound: int
    ladder_bound: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def successes(self) -> int:
        return len(self.stages) - 1

    def to_json(self) -> str:
        return json.dumps({
            "schema": 1, "c": self.c, "reason": self.reason,
            "stage_bound": self.stage_bound, "ladder_bound": self.ladder_bound,
            "stages": [s.to_dict() for s in self.stages], "diagnostics": self.diagnostics,
        }, sort_keys=True, indent=1)


def stage_bounds(delta: float, c: float):
    """``ceil(log_{1+c}(1/delta))`` and ``2/c + log2(1/delta)``."""
    if not 0 < delta <= 1:
        return 0, 0.0
    return math.ceil(math.log(1 / delta) / math.log1p(c) - 1e-12), 2 / c + math.log2(1 / delta)


def run_increment_iteration(A: IntegerSet, c: float = C_DEFAULT, max_stages: int = 64, modulus_cap: int = 2**32,
                            min_N: int = 64, seed: int = 0, **kwargs) -> IterationTrace:
    """Iterate increments, rescaling ``a + s x -> x`` after each one.

    If ``A_i`` lacks configurations of modulus ``q_i`` and the increment has
    step ``s`` (a multiple of ``q_i``), the pulled-back set lacks modulus
    ``q_i s``.  Stops with reason ``empty``, ``small_N``, ``cap``,
    ``increment_failed`` or ``configuration_found``.
    """
    d0 = Fraction(A.cardinality, A.N)
    bound, ladder = stage_bounds(float(d0), c)
    stages = [Stage(A, A.N, 1, d0)]
    trace = IterationTrace(stages, "", c, bound, ladder)
    if A.cardinality == 0:
        trace.reason = "empty"
        return trace
    while True:
        st = stages[-1]
        if st.q > modulus_cap or len(stages) > max_stages:
            trace.reason = "cap"
            break
        if st.N < min_N or st.q > st.N:
            trace.reason = "small_N"
            break
        if not is_configuration_free(st.A, CountingParams(st.q, st.N)):
            trace.reason = "configuration_found"
            trace.diagnostics["witness"] = find_configuration(st.A, st.q)
            break
        res, diag = find_density_increment(st.A, st.q, c=c, seed=seed + len(stages), **kwargs)
        if res is None:
            trace.reason = "small_N" if diag["reason"] == "small_N" else "increment_failed"
            trace.diagnostics = {k: v for k, v in diag.items()}
            break
        P = res.progression
        st.a, st.step = P.a, P.step
        nxt = Stage(st.A.pullback(P.a, P.step, P.length), P.length, st.q * P.step, res.exact_density)
        if nxt.density < (1 + Fraction(c)) * st.density:
            raise AssertionError("density ladder broken")
        stages.append(nxt)
    if trace.successes > bound:
        raise AssertionError("more successful stages than (1+c)^n <= 1/delta allows")
    return trace


# ---------------------------------------------------------------------------
# extremal sets


def greedy_extremal_search(N: int, q: int = 1, strategy: str = "greedy", seed: int = 0,
                           budget: int = 200, both: bool = True) -> IntegerSet:
    """Configuration-free subset of [N] built greedily; the result is verified before return."""
    rng = np.random.default_rng(seed)
    if strategy == "greedy" or strategy == "local_search":
        order = np.arange(1, N + 1, dtype=np.int64)
    elif strategy == "random_greedy":
        order = rng.permutation(N).astype(np.int64) + 1
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    mask = kernels.greedy_free(order, N, q, both)
    if strategy == "local_search":
        mask = _local_search(mask, N, q, both, rng, budget)
    A = IntegerSet(N, mask.astype(bool))
    if not is_configuration_free(A, CountingParams(q, N), "both" if both else "positive"):
        raise AssertionError("extremal search produced a set with a configuration")
    return A


def _local_search(mask, N, q, both, rng, budget):
    """1-for-2 swaps: drop one element, then greedily refill; keep if the set grew."""
    member = np.zeros(N + 1, dtype=np.uint8)
    member[1:] = mask
    check = kernels.adds_configuration
    for _ in range(budget):
        el = np.flatnonzero(member)
        if el.size == 0:
            break
        out = int(rng.choice(el))
        member[out] = 0
        added = []
        for x in (rng.permutation(N) + 1).tolist():
            if x != out and not member[x] and not check(member, x, q, both, N):
                member[x] = 1
                added.append(x)
        if len(added) < 2:
            for x in added:
                member[x] = 0
            member[out] = 1
    return member[1:].copy()


def growth_curve(Ns, q: int = 1, strategy: str = "greedy", seed: int = 0, exponent: float = 0.01):
    """Rows ``(N, card, density, card (log N)^exponent / N)``."""
    rows = []
    for N in Ns:
        A = greedy_extremal_search(N, q, strategy, seed)
        d = A.cardinality / N
        rows.append((N, A.cardinality, d, d * math.log(N) ** exponent))
    return rows


# ---------------------------------------------------------------------------
# the block example


def block_values(N: int) -> np.ndarray:
    K = math.isqrt(N)
    if K * K != N or N < 1:
        raise ValueError("N must be a perfect square")
    x2 = np.arange(1, K + 1)
    block = np.select([x2 % 4 == 0, x2 % 4 == 2], [1.0, -1.0], 0.0)
    return np.repeat(block, K)


def build_section1_example(N: int, max_step: int = 64):
    """Blocks of length ``sqrt N`` valued 0, -1, 0, 1 cyclically.

    ``S`` sums ``f(x) f(x+y)`` over ``y >= 1`` with ``x + y^2 <= N``.
    Progression sums are scanned for steps up to ``max_step``.
    """
    v = block_values(N)
    f = BoundedFunction(v + 0j)
    Y = math.isqrt(N - 1)
    y = np.arange(1, Y + 1, dtype=np.int64)
    funcs = np.stack([v, v, np.ones(N)]).astype(np.complex128)
    S = float(np.sum(kernels.shifted_product_sums(funcs, np.stack([y, y * y], axis=1))).real) if Y else 0.0
    prog = max((kernels.max_progression_sum(v, s) for s in range(1, max_step + 1)), default=0.0)
    stats = {
        "N": N, "S": S, "S_ratio": S / N**1.5,
        "max_progression_sum": prog, "progression_ratio": prog / math.sqrt(N), "max_step": max_step,
    }
    return f, stats


class ProgressionScan:
    """Exact densities of ``A`` on every progression ``a + s [L]`` via per-step prefix sums."""

    def __init__(self, A: IntegerSet, max_step: int = 12):
        self.A, self.max_step = A, max_step
        m = A.mask.astype(np.int64)
        self._pre = {}
        for s in range(1, max_step + 1):
            # pre[s][r][j] = |A ∩ {r+1, r+1+s, ..., r+1+(j-1)s}|
            self._pre[s] = [np.concatenate(([0], np.cumsum(m[r::s]))) for r in range(min(s, A.N))]

    def count(self, P: Progression) -> int:
        s = P.step
        if s > self.max_step:
            raise ValueError("step outside the scanned range")
        start = P.first - 1
        r, j = start % s, start // s
        return int(self._pre[s][r][j + P.length] - self._pre[s][r][j])

    def density(self, P: Progression) -> Fraction:
        return Fraction(self.count(P), P.length)

    def record(self, step: int, length: int) -> Fraction:
        """Largest density over progressions of this step and length inside [N]."""
        best = Fraction(0)
        for r, c in enumerate(self._pre[step]):
            if c.size - 1 >= length:
                best = max(best, Fraction(int((c[length:] - c[:-length]).max()), length))
        return best

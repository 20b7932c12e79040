"""Local functions, local factors, joins and the projection onto a factor."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import BoundedFunction, Progression

MODULUS_CAP = 2**62


@dataclass(frozen=True)
class SimpleLocal:
    """Signature of a simple local factor: interval length, modulus, interval phase."""

    M: int
    q: int
    phase: int = 0

    def __post_init__(self):
        if self.M < 1 or self.q < 1:
            raise ValueError("resolution and modulus must be positive")
        if not 0 <= self.phase < self.M:
            raise ValueError("phase must lie in [0, M)")

    def interval_index(self, x):
        return (np.asarray(x, dtype=np.int64) - 1 + self.phase) // self.M

    def piece_ids(self, N: int) -> np.ndarray:
        x = np.arange(1, N + 1, dtype=np.int64)
        return self.interval_index(x) * self.q + (x % self.q)


@dataclass(frozen=True, eq=False)
class Factor:
    """A partition of [N]; ``atom_id[x - 1]`` names the atom of ``x``.

    ``components`` lists the simple local factors whose join this is, or is
    ``None`` for a partition with no local structure on record.
    """

    atom_id: np.ndarray = field(repr=False)
    components: tuple | None = None

    def __post_init__(self):
        ids = _compact(np.asarray(self.atom_id))
        ids.setflags(write=False)
        object.__setattr__(self, "atom_id", ids)
        object.__setattr__(self, "n_atoms", int(ids.max()) + 1 if ids.size else 0)
        if self.components is not None:
            object.__setattr__(self, "components", tuple(self.components))

    @property
    def N(self) -> int:
        return self.atom_id.shape[0]

    def __len__(self):
        return self.n_atoms

    @property
    def is_local(self) -> bool:
        return self.components is not None

    @property
    def dimension(self) -> int:
        return len(self.components) if self.components else 0

    @property
    def resolution(self) -> int:
        return min((c.M for c in self.components), default=self.N) if self.components else self.N

    @property
    def modulus(self) -> int:
        q = 1
        for c in self.components or ():
            q = _lcm_capped(q, c.q)
        return q

    def sizes(self) -> np.ndarray:
        return np.bincount(self.atom_id, minlength=self.n_atoms)

    def atoms(self) -> list:
        order = np.argsort(self.atom_id, kind="stable")
        bounds = np.cumsum(self.sizes())[:-1]
        return [a + 1 for a in np.split(order, bounds)]

    def atom_progression(self, k: int) -> Progression:
        """Atom ``k`` as a progression; raises if it is not one."""
        el = np.flatnonzero(self.atom_id == k) + 1
        if el.size == 1:
            step = self.modulus if self.is_local else 1
            return Progression(int(el[0]) - step, step, 1)
        d = np.diff(el)
        if not np.all(d == d[0]):
            raise ValueError(f"atom {k} is not an arithmetic progression")
        return Progression(int(el[0] - d[0]), int(d[0]), int(el.size))

    def refines(self, other: "Factor") -> bool:
        """True when every atom of ``self`` sits inside one atom of ``other``."""
        if self.N != other.N:
            return False
        first = np.full(self.n_atoms, -1, dtype=np.int64)
        first[self.atom_id[::-1]] = other.atom_id[::-1]
        return bool(np.all(first[self.atom_id] == other.atom_id))

    def metadata(self) -> dict:
        comps = self.components or ()
        return {
            "schema": 1,
            "N": self.N,
            "atoms": self.n_atoms,
            "d": self.dimension,
            "M": self.resolution if self.is_local else None,
            "q": self.modulus if self.is_local else None,
            "components": [[c.M, c.q, c.phase] for c in comps] if self.is_local else None,
            "phases": [c.phase for c in comps] if self.is_local else None,
        }


def _compact(ids: np.ndarray) -> np.ndarray:
    """Relabel ids 0, 1, 2, ... in order of first appearance."""
    if ids.size == 0:
        return ids.astype(np.int64)
    uniq, first, inv = np.unique(ids, return_index=True, return_inverse=True)
    rank = np.empty(uniq.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(uniq.size)
    return rank[inv.ravel()]


def _lcm_capped(a: int, b: int) -> int:
    out = a * b // math.gcd(a, b)
    if out > MODULUS_CAP:
        raise OverflowError(f"modulus lcm {out} exceeds {MODULUS_CAP}")
    return out


def trivial_factor(N: int) -> Factor:
    return Factor(np.zeros(N, dtype=np.int64), ())


def singleton_factor(N: int) -> Factor:
    return Factor(np.arange(N, dtype=np.int64), None)


def simple_local_factor(N: int, M: int, q: int, phase: int = 0) -> Factor:
    sig = SimpleLocal(M, q, phase)
    return Factor(sig.piece_ids(N), (sig,))


def simple_real_factor(N: int, M: int, phase: int = 0) -> Factor:
    """Cut [N] at the breakpoints ``k M - phase``: atoms ``[kM+1-phase, (k+1)M-phase]``."""
    return simple_local_factor(N, M, 1, phase)


def simple_congruence_factor(N: int, q: int) -> Factor:
    """Residue classes mod ``q``.  Recorded as resolution ``N`` (one interval)."""
    return simple_local_factor(N, N, q, 0)


def join_factors(factors) -> Factor:
    factors = list(factors)
    if not factors:
        raise ValueError("nothing to join")
    N = factors[0].N
    if any(f.N != N for f in factors):
        raise ValueError("factors live on different [N]")
    key = np.zeros(N, dtype=np.int64)
    for f in factors:
        key = _compact(key * f.n_atoms + f.atom_id)
    if all(f.is_local for f in factors):
        comps = tuple(c for f in factors for c in f.components)
        q = 1
        for c in comps:
            q = _lcm_capped(q, c.q)
    else:
        comps = None
    return Factor(key, comps)


def project(f: BoundedFunction, B: Factor) -> BoundedFunction:
    """Atom-wise average: ``(Pi_B f)(x) = mean of f over the atom containing x``."""
    if f.N != B.N:
        raise ValueError("function and factor have different N")
    return BoundedFunction(_project_values(f.values, B), f.bound)


def _project_values(v: np.ndarray, B: Factor) -> np.ndarray:
    ids = B.atom_id
    size = np.bincount(ids, minlength=B.n_atoms)
    re = np.bincount(ids, weights=v.real, minlength=B.n_atoms) / size
    im = np.bincount(ids, weights=v.imag, minlength=B.n_atoms) / size
    return (re + 1j * im)[ids]


def factor_size_bound(d: int, M: int, q: int, N: int) -> int:
    """``ceil(q d (N/M + 2))``: the atom-count ceiling for a local factor."""
    if min(d, M, q, N) < 1:
        raise ValueError("all arguments must be positive")
    return math.ceil(Fraction(q * d) * (Fraction(N, M) + 2))


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LocalFunction:
    """Constant on (length-M interval) ∩ (residue class mod q) pieces.

    ``table[k, r]`` is the value on interval ``k`` (``k = (x - 1 + phase) // M``)
    and residue ``r = x mod q``.  Intervals outside the table read as 0.
    """

    M: int
    q: int
    phase: int
    table: np.ndarray = field(repr=False)
    bound: float = 1.0

    def __post_init__(self):
        SimpleLocal(self.M, self.q, self.phase)
        t = np.array(self.table, dtype=np.complex128)
        if t.ndim != 2 or t.shape[1] != self.q:
            raise ValueError("table must have shape (intervals, q)")
        if t.size and np.abs(t).max() > self.bound + 1e-12:
            raise ValueError("table exceeds the bound")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def signature(self) -> SimpleLocal:
        return SimpleLocal(self.M, self.q, self.phase)

    def values(self, N: int) -> np.ndarray:
        x = np.arange(1, N + 1, dtype=np.int64)
        k = self.signature.interval_index(x)
        out = np.zeros(N, dtype=np.complex128)
        ok = k < self.table.shape[0]
        out[ok] = self.table[k[ok], x[ok] % self.q]
        return out

    def evaluate(self, N: int) -> BoundedFunction:
        return BoundedFunction(self.values(N), self.bound)

    @classmethod
    def from_function(cls, values, M: int, q: int, phase: int = 0, bound: float = 1.0):
        """Read a table off a function already constant on the pieces (first value wins)."""
        v = np.asarray(values, dtype=np.complex128)
        N = v.shape[0]
        x = np.arange(1, N + 1, dtype=np.int64)
        k = (x - 1 + phase) // M
        table = np.zeros((int(k.max()) + 1, q), dtype=np.complex128)
        table[k[::-1], x[::-1] % q] = v[::-1]
        return cls(M, q, phase, table, bound)


def local_function_levels(phi: LocalFunction, N: int) -> Factor:
    """The simple local factor of ``phi``'s pieces; ``phi`` is measurable for it."""
    return simple_local_factor(N, phi.M, phi.q, phi.phase)


def write_factor(B: Factor, csv_path, json_path=None) -> None:
    lines = ["x,atom_id"] + [f"{x},{a}" for x, a in enumerate(B.atom_id.tolist(), start=1)]
    Path(csv_path).write_text("\n".join(lines) + "\n")
    if json_path is not None:
        Path(json_path).write_text(json.dumps(B.metadata(), indent=2) + "\n")


def read_factor(csv_path, json_path=None) -> Factor:
    rows = Path(csv_path).read_text().split()
    if rows[0] != "x,atom_id":
        raise ValueError(f"{csv_path}: header must be 'x,atom_id'")
    pairs = [tuple(int(t) for t in r.split(",")) for r in rows[1:]]
    if [p[0] for p in pairs] != list(range(1, len(pairs) + 1)):
        raise ValueError(f"{csv_path}: x column must be 1..N in order")
    ids = np.array([p[1] for p in pairs], dtype=np.int64)
    comps = None
    if json_path is not None:
        meta = json.loads(Path(json_path).read_text())
        if meta.get("components") is not None:
            comps = tuple(SimpleLocal(*c) for c in meta["components"])
    return Factor(ids, comps)

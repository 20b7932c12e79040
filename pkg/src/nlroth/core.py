"""Functions on [N], integer sets and progressions.

Everything here is 1-based at the interface (``x`` ranges over ``1..N``) and
0-based in storage: ``values[x - 1]`` holds the value at ``x``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

BOUND_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class BoundedFunction:
    """A complex-valued function supported on ``{1..N}`` with ``|f| <= bound``."""

    values: np.ndarray
    bound: float = 1.0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128).ravel()
        if v.size == 0:
            raise ValueError("a function on [N] needs N >= 1")
        if self.bound < 0:
            raise ValueError("bound must be nonnegative")
        peak = float(np.abs(v).max())
        if peak > self.bound + BOUND_SLACK:
            raise ValueError(f"values reach modulus {peak:.6g} > bound {self.bound}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    def __call__(self, x: int) -> complex:
        if 1 <= x <= self.N:
            return complex(self.values[x - 1])
        return 0j

    def __len__(self):
        return self.N

    @property
    def is_real(self) -> bool:
        return not np.any(self.values.imag)

    @classmethod
    def from_values(cls, values, bound=None):
        """Wrap raw values, taking the bound to be ``max(1, max |value|)``."""
        v = np.asarray(values, dtype=np.complex128)
        if bound is None:
            bound = max(1.0, float(np.abs(v).max(initial=0.0)))
        return cls(v, bound)

    @classmethod
    def constant(cls, N: int, c: complex = 1.0):
        return cls(np.full(N, c, dtype=np.complex128), max(1.0, abs(c)))

    def scaled(self, c: complex) -> "BoundedFunction":
        return BoundedFunction(self.values * c, self.bound * abs(c))

    def __add__(self, other: "BoundedFunction") -> "BoundedFunction":
        _same_length(self, other)
        return BoundedFunction(self.values + other.values, self.bound + other.bound)

    def __sub__(self, other: "BoundedFunction") -> "BoundedFunction":
        _same_length(self, other)
        return BoundedFunction(self.values - other.values, self.bound + other.bound)

    def __mul__(self, other: "BoundedFunction") -> "BoundedFunction":
        _same_length(self, other)
        return BoundedFunction(self.values * other.values, self.bound * other.bound)

    def conj(self) -> "BoundedFunction":
        return BoundedFunction(np.conj(self.values), self.bound)

    def padded(self, N: int) -> np.ndarray:
        """Values on ``1..N``; zero past the support, truncated if longer."""
        out = np.zeros(N, dtype=np.complex128)
        m = min(N, self.N)
        out[:m] = self.values[:m]
        return out


def _same_length(f, g):
    if f.N != g.N:
        raise ValueError(f"length mismatch: {f.N} vs {g.N}")


@dataclass(frozen=True, eq=False)
class IntegerSet:
    """A subset of ``{1..N}`` stored as a boolean membership mask."""

    N: int
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool).ravel()
        if self.N < 1 or m.shape[0] != self.N:
            raise ValueError("mask length must equal N >= 1")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "_card", int(np.count_nonzero(m)))

    @classmethod
    def from_elements(cls, N: int, elements) -> "IntegerSet":
        el = np.asarray(list(elements), dtype=np.int64)
        if el.size and (el.min() < 1 or el.max() > N):
            raise ValueError(f"elements must lie in [1, {N}]")
        mask = np.zeros(N, dtype=bool)
        mask[el - 1] = True
        return cls(N, mask)

    @classmethod
    def full(cls, N: int) -> "IntegerSet":
        return cls(N, np.ones(N, dtype=bool))

    @classmethod
    def empty(cls, N: int) -> "IntegerSet":
        return cls(N, np.zeros(N, dtype=bool))

    @property
    def cardinality(self) -> int:
        return self._card

    def __len__(self):
        return self._card

    @property
    def density(self) -> float:
        return self._card / self.N

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.mask) + 1

    def __contains__(self, x) -> bool:
        return 1 <= x <= self.N and bool(self.mask[x - 1])

    def __eq__(self, other):
        return isinstance(other, IntegerSet) and self.N == other.N and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.N, self.mask.tobytes()))

    def count_in(self, P: "Progression") -> int:
        el = P.elements()
        ok = (el >= 1) & (el <= self.N)
        return int(np.count_nonzero(self.mask[el[ok] - 1]))

    def pullback(self, a: int, step: int, length: int) -> "IntegerSet":
        """``{x in [length] : a + step * x in self}``."""
        xs = a + step * np.arange(1, length + 1, dtype=np.int64)
        ok = (xs >= 1) & (xs <= self.N)
        mask = np.zeros(length, dtype=bool)
        mask[ok] = self.mask[xs[ok] - 1]
        return IntegerSet(length, mask)


@dataclass(frozen=True)
class Progression:
    """``{a + step * k : k = 1..length}``."""

    a: int
    step: int
    length: int

    def __post_init__(self):
        if self.step < 1:
            raise ValueError("step must be positive")
        if self.length < 0:
            raise ValueError("length must be nonnegative")

    def elements(self) -> np.ndarray:
        return self.a + self.step * np.arange(1, self.length + 1, dtype=np.int64)

    @property
    def first(self) -> int:
        return self.a + self.step

    @property
    def last(self) -> int:
        return self.a + self.step * self.length

    def within(self, N: int) -> bool:
        return self.length == 0 or (self.first >= 1 and self.last <= N)


def indicator(A: IntegerSet) -> BoundedFunction:
    return BoundedFunction(A.mask.astype(np.complex128), 1.0)


def balanced_part(A: IntegerSet) -> BoundedFunction:
    """``1_A - (|A|/N) 1_[N]``, which has mean zero."""
    return BoundedFunction(A.mask.astype(np.float64) - A.density + 0j, 1.0)


def inner_product(f: BoundedFunction, g: BoundedFunction) -> complex:
    """``sum_x f(x) * conj(g(x))``."""
    _same_length(f, g)
    return complex(np.vdot(g.values, f.values))


def lp_norm(f: BoundedFunction, p=2) -> float:
    a = np.abs(f.values)
    if p == math.inf or p == "inf":
        return float(a.max())
    p = float(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 1:
        return float(a.sum())
    if p == 2:
        return float(np.sqrt(np.dot(a, a)))
    return float((a**p).sum() ** (1 / p))


# ---------------------------------------------------------------------------
# files


def write_set(A: IntegerSet, path) -> None:
    lines = [f"N={A.N}"] + [str(x) for x in A.elements().tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_set(path) -> IntegerSet:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("N="):
        raise ValueError(f"{path}: first line must be 'N=<N>'")
    N = int(lines[0][2:])
    el = [int(s) for s in lines[1:]]
    if el != sorted(set(el)):
        raise ValueError(f"{path}: elements must be strictly ascending")
    return IntegerSet.from_elements(N, el)


def write_function(f: BoundedFunction, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im"])
        for x, v in enumerate(f.values.tolist(), start=1):
            w.writerow([x, repr(v.real), repr(v.imag)])


def read_function(path, bound=None) -> BoundedFunction:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: empty function file")
    xs = [int(r["x"]) for r in rows]
    if xs != list(range(1, len(xs) + 1)):
        raise ValueError(f"{path}: x column must be 1..N in order")
    v = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    return BoundedFunction.from_values(v, bound)

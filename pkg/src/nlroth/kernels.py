"""Hot inner loops.

Every kernel exists twice: a loop version compiled with numba (``*_loop``)
and a vectorised numpy version (``*_numpy``).  The public name is bound to
one of them according to :data:`nlroth._accel.BACKEND`; both are kept
importable so tests and ``benchmarks/bench_kernels.py`` can compare them.

All arrays are 0-based: index ``i`` holds the value at ``x = i + 1``.  A shift
``s`` therefore means the same thing in index space and in ``x`` space.
Positions that fall outside ``[0, N)`` read as zero.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_LOW20 = (1 << 20) - 1
_TWO33 = float(2**33)
_TWO20 = float(2**20)


# ---------------------------------------------------------------------------
# phase arithmetic


@njit
def _frac_mul_small(c, m):
    # c in [0, 1), 0 <= m < 2**20: the high 33 bits of c times m is exact
    c1 = np.floor(c * _TWO33) / _TWO33
    t = c1 * m
    t -= np.floor(t)
    t += (c - c1) * m
    return t - np.floor(t)


@njit
def frac_mul(alpha, n):
    """Fractional part of ``alpha * n`` for an integer ``0 <= n < 2**40``.

    Splits ``n`` into 20-bit halves so that every partial product that matters
    is exact in double precision; the error stays near 1e-16 instead of growing
    like ``n * 2**-53``.
    """
    a = alpha - np.floor(alpha)
    nh = n >> 20
    nl = n & _LOW20
    a20 = a * _TWO20
    a20 -= np.floor(a20)
    t = _frac_mul_small(a, nl) + _frac_mul_small(a20, nh)
    return t - np.floor(t)


def frac_mul_array(alpha, n):
    """Vectorised :func:`frac_mul` for an integer array ``n``."""
    n = np.asarray(n, dtype=np.int64)
    a = alpha - np.floor(alpha)
    nh = (n >> 20).astype(np.float64)
    nl = (n & _LOW20).astype(np.float64)
    a20 = a * _TWO20
    a20 -= np.floor(a20)
    out = np.zeros(n.shape)
    for c, m in ((a, nl), (a20, nh)):
        c1 = np.floor(c * _TWO33) / _TWO33
        t = c1 * m
        t -= np.floor(t)
        t += (c - c1) * m
        out += t - np.floor(t)
    return out - np.floor(out)


# ---------------------------------------------------------------------------
# indicator counting: packed 64-bit words with SWAR popcount


@njit
def _popcount64(v):
    v = v - ((v >> np.uint64(1)) & _M1)
    v = (v & _M2) + ((v >> np.uint64(2)) & _M2)
    v = (v + (v >> np.uint64(4))) & _M4
    return (v * _H01) >> np.uint64(56)


@njit
def _pack_bits(bits):
    n = bits.shape[0]
    nw = (n + 63) // 64 + 2
    words = np.zeros(nw, dtype=np.uint64)
    for i in range(n):
        if bits[i]:
            words[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    return words


@njit
def _extract_word(words, pos):
    wi = pos >> 6
    sh = pos & 63
    v = words[wi] >> np.uint64(sh)
    if sh != 0:
        v |= words[wi + 1] << np.uint64(64 - sh)
    return v


@njit
def shift_counts_loop(bits, shifts):
    """Per-row counts of ``x`` with ``bits[x]`` and ``bits[x + s]`` for all ``s`` in the row."""
    n = bits.shape[0]
    ny, k = shifts.shape
    words = _pack_bits(bits)
    out = np.zeros(ny, dtype=np.int64)
    for r in range(ny):
        lo = 0
        hi = n
        for j in range(k):
            s = shifts[r, j]
            if -s > lo:
                lo = -s
            if n - s < hi:
                hi = n - s
        if hi <= lo:
            continue
        length = hi - lo
        nfull = length >> 6
        rem = length & 63
        total = 0
        for w in range(nfull + (1 if rem else 0)):
            base = lo + (w << 6)
            v = _extract_word(words, base)
            for j in range(k):
                v &= _extract_word(words, base + shifts[r, j])
            if w == nfull:
                v &= (np.uint64(1) << np.uint64(rem)) - np.uint64(1)
            total += _popcount64(v)
        out[r] = total
    return out


def shift_counts_numpy(bits, shifts):
    bits = np.asarray(bits, dtype=bool)
    n = bits.shape[0]
    out = np.zeros(shifts.shape[0], dtype=np.int64)
    for r, row in enumerate(shifts):
        lo = max(0, -int(row.min()))
        hi = min(n, n - int(row.max()))
        if hi <= lo:
            continue
        acc = bits[lo:hi].copy()
        for s in row:
            acc &= bits[lo + s : hi + s]
        out[r] = np.count_nonzero(acc)
    return out


# ---------------------------------------------------------------------------
# complex multilinear sums


@njit
def shifted_product_sums_loop(funcs, shifts):
    """Row ``r``: sum over x of ``funcs[0][x] * prod_j funcs[j+1][x + shifts[r, j]]``."""
    n = funcs.shape[1]
    ny, k = shifts.shape
    out = np.zeros(ny, dtype=np.complex128)
    for r in range(ny):
        lo = 0
        hi = n
        for j in range(k):
            s = shifts[r, j]
            if -s > lo:
                lo = -s
            if n - s < hi:
                hi = n - s
        acc = 0j
        for x in range(lo, hi):
            v = funcs[0, x]
            if v == 0:
                continue
            for j in range(k):
                v *= funcs[j + 1, x + shifts[r, j]]
            acc += v
        out[r] = acc
    return out


def shifted_product_sums_numpy(funcs, shifts):
    n = funcs.shape[1]
    out = np.zeros(shifts.shape[0], dtype=np.complex128)
    for r, row in enumerate(shifts):
        lo = max(0, -int(row.min()))
        hi = min(n, n - int(row.max()))
        if hi <= lo:
            continue
        v = funcs[0, lo:hi].copy()
        for j, s in enumerate(row):
            v *= funcs[j + 1, lo + s : hi + s]
        out[r] = v.sum()
    return out


@njit
def pair_shift_sum_loop(ga, gb, sa, sb):
    """``out[u] = sum_r ga[u + sa[r]] * gb[u + sb[r]]`` for u in [0, N)."""
    n = ga.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for r in range(sa.shape[0]):
        a = sa[r]
        b = sb[r]
        lo = max(0, max(-a, -b))
        hi = min(n, min(n - a, n - b))
        for u in range(lo, hi):
            out[u] += ga[u + a] * gb[u + b]
    return out


def pair_shift_sum_numpy(ga, gb, sa, sb):
    n = ga.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for a, b in zip(sa.tolist(), sb.tolist()):
        lo = max(0, -a, -b)
        hi = min(n, n - a, n - b)
        if hi > lo:
            out[lo:hi] += ga[lo + a : hi + a] * gb[lo + b : hi + b]
    return out


# ---------------------------------------------------------------------------
# sums of three squares


@njit
def r3_counts_loop(n):
    """``out[s]`` = number of ordered (a, b, c) in [n]^3 with a^2 + b^2 + c^2 = s."""
    out = np.zeros(3 * n * n + 1, dtype=np.int64)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            ab = a * a + b * b
            for c in range(1, n + 1):
                out[ab + c * c] += 1
    return out


def r3_counts_numpy(n):
    sq = np.arange(1, n + 1, dtype=np.int64) ** 2
    r2 = np.bincount((sq[:, None] + sq[None, :]).ravel(), minlength=2 * n * n + 1)
    out = np.zeros(3 * n * n + 1, dtype=np.int64)
    for c2 in sq.tolist():
        out[c2 : c2 + r2.shape[0]] += r2
    return out


# ---------------------------------------------------------------------------
# exponential sums


@njit
def fourier_sums_loop(values, positions, alphas):
    """``out[k] = sum_i values[i] * e(alphas[k] * positions[i])``."""
    out = np.zeros(alphas.shape[0], dtype=np.complex128)
    two_pi = 2.0 * np.pi
    for k in range(alphas.shape[0]):
        acc = 0j
        for i in range(values.shape[0]):
            v = values[i]
            if v == 0:
                continue
            t = two_pi * frac_mul(alphas[k], positions[i])
            acc += v * complex(np.cos(t), np.sin(t))
        out[k] = acc
    return out


def fourier_sums_numpy(values, positions, alphas, chunk=1 << 22):
    values = np.asarray(values, dtype=np.complex128)
    positions = np.asarray(positions, dtype=np.int64)
    keep = values != 0
    values, positions = values[keep], positions[keep]
    out = np.zeros(len(alphas), dtype=np.complex128)
    step = max(1, chunk // max(1, len(values)))
    for k0 in range(0, len(alphas), step):
        block = alphas[k0 : k0 + step]
        phase = np.stack([frac_mul_array(a, positions) for a in block]) if len(block) else None
        if phase is None:
            continue
        out[k0 : k0 + len(block)] = np.exp(2j * np.pi * phase) @ values
    return out


# ---------------------------------------------------------------------------
# greedy configuration-free sets


@njit
def _in_set(member, x, extra, n):
    # member is indexed by x (1-based, slot 0 unused); ``extra`` counts as present
    if x < 1 or x > n:
        return False
    return x == extra or member[x] != 0


@njit
def creates_configuration(member, x, q, both, n):
    """Would adding ``x`` complete some (u, u+y, u+q*y^2) inside [1, n]?"""
    t = 1
    while q * t * t <= n - 1:
        d2 = q * t * t
        for sgn in (1, -1):
            if sgn == -1 and not both:
                continue
            d1 = sgn * t
            # x as u, as u + d1, as u + d2
            for u in (x, x - d1, x - d2):
                if (
                    _in_set(member, u, x, n)
                    and _in_set(member, u + d1, x, n)
                    and _in_set(member, u + d2, x, n)
                ):
                    return True
        t += 1
    return False


@njit
def greedy_free_loop(order, n, q, both):
    member = np.zeros(n + 1, dtype=np.uint8)
    for i in range(order.shape[0]):
        x = order[i]
        if not creates_configuration(member, x, q, both, n):
            member[x] = 1
    return member[1:].copy()


def creates_configuration_numpy(member, x, q, both, n):
    tmax = math.isqrt((n - 1) // q) if n > 1 else 0
    if tmax == 0:
        return False
    present_set = member.astype(bool)
    present_set[x] = True
    t = np.arange(1, tmax + 1, dtype=np.int64)
    d2 = q * t * t

    def present(v):
        ok = (v >= 1) & (v <= n)
        return ok & present_set[np.where(ok, v, 0)]

    for sgn in ((1, -1) if both else (1,)):
        d1 = sgn * t
        for u in (np.full_like(t, x), x - d1, x - d2):
            if np.any(present(u) & present(u + d1) & present(u + d2)):
                return True
    return False


def greedy_free_numpy(order, n, q, both):
    member = np.zeros(n + 1, dtype=np.uint8)
    for x in np.asarray(order).tolist():
        if not creates_configuration_numpy(member, x, q, both, n):
            member[x] = 1
    return member[1:].copy()


# ---------------------------------------------------------------------------
# projections and progression sums


@njit
def atom_abs_sum_loop(ids, values, n_atoms):
    """``sum over atoms of |sum of values on the atom|``."""
    acc = np.zeros(n_atoms, dtype=np.complex128)
    for i in range(ids.shape[0]):
        acc[ids[i]] += values[i]
    total = 0.0
    for a in range(n_atoms):
        total += abs(acc[a])
    return total


def atom_abs_sum_numpy(ids, values, n_atoms):
    re = np.bincount(ids, weights=values.real, minlength=n_atoms)
    im = np.bincount(ids, weights=values.imag, minlength=n_atoms)
    return float(np.hypot(re, im).sum())


@njit
def join_abs_sum_loop(ka, kb, L, values):
    """``atom_abs_sum`` for the join of two interval partitions and residues mod ``L``.

    ``ka, kb`` are nondecreasing interval labels of positions ``1..n``; a new
    join interval starts wherever either label changes.
    """
    n = values.shape[0]
    n_int = 1
    for i in range(1, n):
        if ka[i] != ka[i - 1] or kb[i] != kb[i - 1]:
            n_int += 1
    acc = np.zeros(n_int * L, dtype=np.complex128)
    j = 0
    for i in range(n):
        if i > 0 and (ka[i] != ka[i - 1] or kb[i] != kb[i - 1]):
            j += 1
        acc[j * L + (i + 1) % L] += values[i]
    total = 0.0
    for a in range(acc.shape[0]):
        total += abs(acc[a])
    return total


def join_abs_sum_numpy(ka, kb, L, values):
    n = values.shape[0]
    change = np.zeros(n, dtype=np.int64)
    change[1:] = (np.diff(ka) != 0) | (np.diff(kb) != 0)
    interval = np.cumsum(change)
    ids = interval * L + np.arange(1, n + 1, dtype=np.int64) % L
    return atom_abs_sum_numpy(ids, values, int(interval[-1] + 1) * L)


@njit
def max_progression_sum_loop(values, step):
    """Largest ``|sum_{x in P} values[x]|`` over progressions of the given step."""
    n = values.shape[0]
    best = 0.0
    for r in range(min(step, n)):
        s = 0.0
        lo = 0.0
        hi = 0.0
        for i in range(r, n, step):
            s += values[i]
            if s < lo:
                lo = s
            if s > hi:
                hi = s
        if hi - lo > best:
            best = hi - lo
    return best


def max_progression_sum_numpy(values, step):
    best = 0.0
    for r in range(min(step, len(values))):
        c = np.concatenate(([0.0], np.cumsum(values[r::step])))
        best = max(best, float(c.max() - c.min()))
    return best


# ---------------------------------------------------------------------------

KERNELS = {
    "shift_counts": (shift_counts_loop, shift_counts_numpy),
    "shifted_product_sums": (shifted_product_sums_loop, shifted_product_sums_numpy),
    "pair_shift_sum": (pair_shift_sum_loop, pair_shift_sum_numpy),
    "r3_counts": (r3_counts_loop, r3_counts_numpy),
    "fourier_sums": (fourier_sums_loop, fourier_sums_numpy),
    "greedy_free": (greedy_free_loop, greedy_free_numpy),
    "creates_configuration": (creates_configuration, creates_configuration_numpy),
    "atom_abs_sum": (atom_abs_sum_loop, atom_abs_sum_numpy),
    "max_progression_sum": (max_progression_sum_loop, max_progression_sum_numpy),
    "join_abs_sum": (join_abs_sum_loop, join_abs_sum_numpy),
}

_pick = 0 if USE_NUMBA else 1
shift_counts = KERNELS["shift_counts"][_pick]
shifted_product_sums = KERNELS["shifted_product_sums"][_pick]
pair_shift_sum = KERNELS["pair_shift_sum"][_pick]
r3_counts = KERNELS["r3_counts"][_pick]
fourier_sums = KERNELS["fourier_sums"][_pick]
greedy_free = KERNELS["greedy_free"][_pick]
adds_configuration = KERNELS["creates_configuration"][_pick]
atom_abs_sum = KERNELS["atom_abs_sum"][_pick]
max_progression_sum = KERNELS["max_progression_sum"][_pick]
join_abs_sum = KERNELS["join_abs_sum"][_pick]

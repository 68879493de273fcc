"""Optional numba acceleration with pure-numpy fallbacks.

Every kernel here has two implementations selected at import time: a numba
``@njit`` version and a vectorized numpy version with identical semantics.
Set ``ISINGRG_DISABLE_NUMBA=1`` to force the numpy path (the test suite and
the benchmark exercise both).  ``HAS_NUMBA`` reports which path is live.
"""

from __future__ import annotations

import os

import numpy as np

try:
    if os.environ.get("ISINGRG_DISABLE_NUMBA"):
        raise ImportError("numba disabled via ISINGRG_DISABLE_NUMBA")
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag in CI runs
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # noqa: D401 - decorator passthrough
        """No-op stand-in for numba.njit."""
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap

    prange = range


def _partition_brute_numpy(k_horiz: float, k_vert: float, n_cols: int, n_rows: int) -> float:
    """Sum exp(k_horiz*<within-row bonds> + k_vert*<between-row bonds>) over
    all spin configurations of the periodic n_cols x n_rows torus."""
    n = n_cols * n_rows
    if n > 24:
        raise ValueError("brute-force partition limited to 24 spins")
    configs = np.arange(1 << n, dtype=np.int64)
    total = 0.0
    # batch to bound memory: 2^20 configs x n bits of int8
    step = 1 << 20
    for lo in range(0, 1 << n, step):
        c = configs[lo:lo + step]
        bits = (c[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1
        s = (2 * bits - 1).astype(np.int8).reshape(-1, n_rows, n_cols)
        vert = np.einsum("brc,brc->b", s, np.roll(s, -1, axis=1), dtype=np.float64)
        horiz = np.einsum("brc,brc->b", s, np.roll(s, -1, axis=2), dtype=np.float64)
        total += float(np.exp(k_horiz * horiz + k_vert * vert).sum())
    return total


@njit(cache=True)
def _partition_brute_numba(k_horiz: float, k_vert: float, n_cols: int, n_rows: int) -> float:  # pragma: no cover - numba path
    # Gray-code enumeration: successive configurations differ by one spin
    # flip, so both bond energies update in O(1).  Energies are integers in
    # [-n, n]; exact counts per (horizontal, vertical) energy pair make the
    # final Boltzmann sum a short exactly-weighted series (no long float
    # accumulation, which costs ~1e-10 relative error at 24 spins).
    n = n_cols * n_rows
    width = 2 * n + 1
    spins = np.full(n, -1, dtype=np.int64)
    left = np.empty(n, dtype=np.int64)
    right = np.empty(n, dtype=np.int64)
    down = np.empty(n, dtype=np.int64)
    up = np.empty(n, dtype=np.int64)
    for j in range(n):
        r = j // n_cols
        q = j - r * n_cols
        left[j] = r * n_cols + (q - 1) % n_cols
        right[j] = r * n_cols + (q + 1) % n_cols
        down[j] = ((r - 1) % n_rows) * n_cols + q
        up[j] = ((r + 1) % n_rows) * n_cols + q
    e_h = n
    e_v = n
    hist = np.zeros(width * width, dtype=np.int64)
    hist[(e_h + n) * width + (e_v + n)] += 1
    for i in range(1, 1 << n):
        diff = i & (-i)  # flipped Gray-code bit
        j = 0
        while diff > 1:
            diff >>= 1
            j += 1
        sj = spins[j]
        e_h -= 2 * sj * (spins[left[j]] + spins[right[j]])
        e_v -= 2 * sj * (spins[down[j]] + spins[up[j]])
        spins[j] = -sj
        hist[(e_h + n) * width + (e_v + n)] += 1
    total = 0.0
    for a in range(width):
        f_h = np.exp(k_horiz * (a - n))
        for b in range(width):
            count = hist[a * width + b]
            if count:
                total += count * f_h * np.exp(k_vert * (b - n))
    return total


def partition_brute(k_horiz: float, k_vert: float, n_cols: int, n_rows: int) -> float:
    """Brute-force torus partition sum (numba when available).

    ``k_horiz`` couples neighbors within a row (column j to j+1, periodic),
    ``k_vert`` couples the same column across neighboring rows.
    """
    if n_cols * n_rows > 24:
        raise ValueError("brute-force partition limited to 24 spins")
    if HAS_NUMBA:
        return float(_partition_brute_numba(k_horiz, k_vert, n_cols, n_rows))
    return _partition_brute_numpy(k_horiz, k_vert, n_cols, n_rows)


def _cascade_abs2_numpy(taps: np.ndarray, k: np.ndarray, depth: int) -> np.ndarray:
    """prod_{n=1..depth} |m0(k/2^n)|^2 for the low-pass ``taps``."""
    out = np.ones_like(k, dtype=np.float64)
    idx = np.arange(taps.size)
    for n in range(1, depth + 1):
        theta = k / (2.0 ** n)
        ph = np.exp(-1j * np.outer(theta, idx))
        m0 = ph @ taps.astype(np.complex128) / np.sqrt(2.0)
        out *= np.abs(m0) ** 2
    return out


@njit(cache=True, parallel=True)
def _cascade_abs2_numba(taps: np.ndarray, k: np.ndarray, depth: int) -> np.ndarray:  # pragma: no cover - numba path
    out = np.empty(k.size, dtype=np.float64)
    for i in prange(k.size):
        acc = 1.0
        for n in range(1, depth + 1):
            theta = k[i] / (2.0 ** n)
            re = 0.0
            im = 0.0
            for j in range(taps.size):
                re += taps[j] * np.cos(theta * j)
                im -= taps[j] * np.sin(theta * j)
            acc *= (re * re + im * im) / 2.0
        out[i] = acc
    return out


def cascade_abs2(taps: np.ndarray, k: np.ndarray, depth: int) -> np.ndarray:
    """Squared cascade modulus prod |m0(k/2^n)|^2, n = 1..depth."""
    taps = np.asarray(taps, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    if HAS_NUMBA:
        return _cascade_abs2_numba(taps, k, depth)
    return _cascade_abs2_numpy(taps, k, depth)

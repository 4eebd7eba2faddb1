"""Deterministic accumulation helpers.

Every real or complex reduction in this package goes through one of the
functions below.  The reduction tree depends only on the input length
(fixed chunk size, pairwise combination in index order), never on worker
count or scheduling, so repeated runs produce byte-identical results.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

CHUNK = 4096


def pairwise_sum(x: np.ndarray) -> complex | float:
    """Sum a 1-d array with a fixed-shape pairwise tree."""
    a = np.asarray(x).ravel()
    if a.size == 0:
        return a.dtype.type(0).item() if a.dtype != object else 0.0
    # pad to a multiple of CHUNK, sum each chunk, then halve until scalar
    n = a.size
    pad = (-n) % CHUNK
    if pad:
        a = np.concatenate([a, np.zeros(pad, dtype=a.dtype)])
    parts = a.reshape(-1, CHUNK).sum(axis=1)
    while parts.size > 1:
        if parts.size % 2:
            parts = np.concatenate([parts, np.zeros(1, dtype=parts.dtype)])
        parts = parts[0::2] + parts[1::2]
    return parts[0].item()


def reduce_parts(parts: Iterable[complex]) -> complex:
    """Combine per-chunk partial sums pairwise in index order."""
    vals = list(parts)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals) - 1, 2):
            nxt.append(vals[i] + vals[i + 1])
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def kahan_sum(values: Iterable[float]) -> float:
    """Neumaier-compensated sum for scalar Python loops."""
    s = 0.0
    comp = 0.0
    for v in values:
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    return s + comp


def chunked(n: int, size: int = 1 << 20):
    """Yield (lo, hi) index ranges covering range(n) in fixed-size blocks."""
    lo = 0
    while lo < n:
        hi = min(lo + size, n)
        yield lo, hi
        lo = hi


def two_prod(a: np.ndarray, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Error-free product: a*b = hi + lo exactly (Dekker splitting)."""
    a = np.asarray(a, dtype=np.float64)
    hi = a * b
    split = 134217729.0  # 2**27 + 1
    ca = split * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = split * b
    bhi = cb - (cb - b)
    blo = b - bhi
    lo = ((ahi * bhi - hi) + ahi * blo + alo * bhi) + alo * blo
    return hi, lo


def frac_mod1(n: np.ndarray, xi: float) -> np.ndarray:
    """Fractional part of n*xi computed in double-double precision.

    n is an exact-integer-valued float array.  The naive product n*xi
    loses the low bits that determine the phase once n*xi is large; the
    two_prod correction restores them.
    """
    hi, lo = two_prod(n, xi)
    f = hi - np.floor(hi)
    f = f + lo
    f -= np.floor(f)
    return f


def phase(n: np.ndarray, xi: float) -> np.ndarray:
    """exp(2*pi*i*n*xi) with double-double argument reduction.

    Negative xi is evaluated through the positive-xi path and conjugated,
    which makes conjugate symmetry in xi exact at the bit level.
    """
    if xi < 0:
        return np.conj(phase(n, -xi))
    f = frac_mod1(n, xi)
    return np.exp((2j * math.pi) * f)

"""Exponential sums along floors of a regularly varying function.

The three sums of interest, all at frequency xi in [-1/2, 1/2):

    prime sum        sum over p <= N of log p * e(floor(h(p)) * xi)
    von Mangoldt sum sum over n <= N of Lambda(n) * e(floor(h(n)) * xi)
    approximant      sum over n <= h(N) of phi'(n) * e(n * xi)

with e(x) = exp(2*pi*i*x) and phi the compositional inverse of h.

Floors are guarded: a double evaluation is accepted only when its
fractional part is inside (1e-9, 1 - 1e-9); the few values outside the
band are recomputed at 40 significant digits before flooring.  Phases
reduce floor(h(p)) * xi modulo 1 in double-double arithmetic, and every
accumulation uses the fixed-shape pairwise tree from accum, so results
are reproducible bit for bit and conjugate-symmetric in xi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import primes
from .accum import chunked, pairwise_sum, phase, reduce_parts
from .regvar import InverseHandle, RegVarFunction

EPSILON = 1.0 / 12.0  # default subpolynomial-decay parameter
GUARD = 1.0e-9

_CHUNK = 1 << 20


def theta1_default(c: float) -> float:
    """Major-arc cutoff exponent 6c/5 - 14/15."""
    return 6.0 * c / 5.0 - 14.0 / 15.0


def fourier_cut(c: float) -> float:
    """Truncation exponent (8 - 6c)/45 used for frequency cutoffs."""
    return (8.0 - 6.0 * c) / 45.0


def chi_bound(c: float, theta1: float | None = None) -> float:
    """Largest admissible minor-arc saving exponent for this c, theta1."""
    if theta1 is None:
        theta1 = theta1_default(c)
    cap = min((8.0 - 6.0 * c) / 45.0, (6.0 * c - 2.0 - 9.0 * theta1) / 36.0)
    if cap <= 0.0:
        raise ValueError(f"no positive saving for c={c}, theta1={theta1}")
    return cap


def normalizer(n: float, epsilon: float = EPSILON) -> float:
    """n * exp(-(log n)**(1/3 - epsilon))."""
    if not 0.0 <= epsilon < 1.0 / 3.0:
        raise ValueError("epsilon must lie in [0, 1/3)")
    return float(n) * math.exp(-math.log(n) ** (1.0 / 3.0 - epsilon))


@dataclass(frozen=True)
class ExpSumResult:
    value: complex
    n_terms: int
    N: float
    xi: float
    kind: str
    flagged: int = 0

    @property
    def abs(self) -> float:
        return abs(self.value)


def _mp_floor(v: mpmath.mpf) -> int:
    """Floor that treats values within 1e-30 of an integer as that integer.

    The 40-digit recomputation of a genuinely integral h(n) can land an
    epsilon on either side; without the snap the floor would flip on e.g.
    9**1.5.  A true non-integer within 1e-30 of an integer is far beyond
    what the catalog functions produce at any feasible argument.
    """
    r = mpmath.nint(v)
    if abs(v - r) < mpmath.mpf("1e-30"):
        return int(r)
    return int(mpmath.floor(v))


def guarded_floor(h: RegVarFunction, n: np.ndarray) -> tuple[np.ndarray, int]:
    """floor(h(n)) as exact integers, with out-of-band values recomputed."""
    x = n.astype(np.float64)
    v = h.value(x)
    fl = np.floor(v)
    frac = v - fl
    bad = np.flatnonzero((frac <= GUARD) | (frac >= 1.0 - GUARD))
    out = fl.astype(np.int64)
    for i in bad:
        out[i] = _mp_floor(h.eval_mp(float(n[i])))
    return out, int(bad.size)


_floor_cache: dict = {}


def _floors_upto(h: RegVarFunction, N: int) -> tuple[np.ndarray, np.ndarray, int]:
    """(primes <= N, their floors, flagged count), cached per (h, N)."""
    key = (h, int(N))
    if key in _floor_cache:
        return _floor_cache[key]
    p = primes.primes_upto(int(N))
    fl, flagged = guarded_floor(h, p)
    if len(_floor_cache) > 3:
        _floor_cache.clear()
    _floor_cache[key] = (p, fl, flagged)
    return _floor_cache[key]


def prime_floor_sum(h: RegVarFunction, N: float, xi: float) -> ExpSumResult:
    """Log-weighted exponential sum over primes up to N."""
    p, fl, flagged = _floors_upto(h, int(N))
    w = np.log(p.astype(np.float64))
    parts = []
    for lo, hi in chunked(p.size, _CHUNK):
        parts.append(pairwise_sum(w[lo:hi] * phase(fl[lo:hi].astype(np.float64), xi)))
    return ExpSumResult(reduce_parts(parts), int(p.size), float(N), float(xi),
                        "prime", flagged)


def von_mangoldt_sum(h: RegVarFunction, N: float, xi: float) -> ExpSumResult:
    """Same sum with Lambda weights over all n <= N."""
    N = int(N)
    lam = primes.von_mangoldt_range(0, N + 1)
    n = np.flatnonzero(lam)
    if n.size == 0:
        return ExpSumResult(0j, 0, float(N), float(xi), "vonmangoldt", 0)
    fl, flagged = guarded_floor(h, n)
    w = lam[n]
    parts = []
    for lo, hi in chunked(n.size, _CHUNK):
        parts.append(pairwise_sum(w[lo:hi] * phase(fl[lo:hi].astype(np.float64), xi)))
    return ExpSumResult(reduce_parts(parts), int(n.size), float(N), float(xi),
                        "vonmangoldt", flagged)


_phiprime_cache: dict = {}


def _phi_prime_table(h: RegVarFunction, lam: int) -> np.ndarray:
    """phi'(n) for n = 1..lam, chunked Newton inversion, cached."""
    key = (h, int(lam))
    if key in _phiprime_cache:
        return _phiprime_cache[key]
    inv = InverseHandle(h)
    out = np.empty(lam, dtype=np.float64)
    for lo, hi in chunked(lam, _CHUNK):
        n = np.arange(lo + 1, hi + 1, dtype=np.float64)
        out[lo:hi] = inv.d1(n)
    _phiprime_cache.clear()  # tables are large; keep only the latest
    _phiprime_cache[key] = out
    return out


def approximant_sum(h: RegVarFunction, N: float, xi: float) -> ExpSumResult:
    """Smooth major-arc approximant: sum of phi'(n) e(n xi), n <= h(N)."""
    hN = h.value(float(N))
    lam = int(math.floor(hN))
    if abs(hN - round(hN)) <= GUARD:
        lam = _mp_floor(h.eval_mp(float(N)))
    if lam < 1:
        return ExpSumResult(0j, 0, float(N), float(xi), "approximant", 0)
    w = _phi_prime_table(h, lam)
    parts = []
    for lo, hi in chunked(lam, _CHUNK):
        n = np.arange(lo + 1, hi + 1, dtype=np.float64)
        parts.append(pairwise_sum(w[lo:hi] * phase(n, xi)))
    return ExpSumResult(reduce_parts(parts), lam, float(N), float(xi),
                        "approximant", 0)


@dataclass(frozen=True)
class ApproxError:
    N: float
    xi: float
    prime_sum: complex
    approximant: complex
    abs_error: float
    rel_error: float       # abs_error / N
    normalizer: float      # N * exp(-(log N)**(1/3 - epsilon))
    ratio: float
    epsilon: float


def approx_error(h: RegVarFunction, N: float, xi: float,
                 epsilon: float = EPSILON) -> ApproxError:
    """Distance between the prime sum and its smooth approximant."""
    s = prime_floor_sum(h, N, xi)
    f = approximant_sum(h, N, xi)
    err = abs(s.value - f.value)
    norm = normalizer(N, epsilon)
    return ApproxError(float(N), float(xi), s.value, f.value, err,
                       err / float(N), norm, err / norm, epsilon)


# -- minor-arc scanning ------------------------------------------------------


def sample_frequencies(N: float, theta1: float, count: int = 24) -> np.ndarray:
    """Deterministic minor-arc frequencies: near-rationals plus a
    golden-ratio low-discrepancy sweep, all with ||xi|| > N**(-theta1)."""
    cut = float(N) ** (-theta1)
    delta = max(2.0 * cut, 1.0e-4)
    base = [1 / 2, 1 / 3, 1 / 4, 1 / 5, 2 / 5, 1 / 7, 1 / 8, 3 / 8]
    pts = []
    for r in base:
        pts.extend([r - delta, r + delta])
    g = (math.sqrt(5.0) - 1.0) / 2.0
    j = 1
    while len(pts) < count:
        pts.append((j * g) % 1.0)
        j += 1
    # map to [-1/2, 1/2) and keep the minor-arc condition
    out = []
    for x in pts:
        x = x - math.floor(x + 0.5)
        if min(abs(x), 1.0 - abs(x)) > cut:
            out.append(x)
    return np.array(sorted(set(out)), dtype=np.float64)


@dataclass(frozen=True)
class ArcProfile:
    n_grid: tuple
    theta1: float
    chi: float
    epsilon: float
    xi_samples: tuple          # one tuple of frequencies per N
    abs_values: tuple          # matching |S| magnitudes
    max_abs: tuple             # per-N maxima
    slope: float               # least-squares log-log slope of max_abs

    def summary(self) -> str:
        rows = [f"N={n:>10.0f}  max|S|={m:.6e}" for n, m in
                zip(self.n_grid, self.max_abs)]
        return "\n".join(rows + [f"slope={self.slope:.4f} (chi cap {self.chi:.5f})"])


def minor_arc_scan(h: RegVarFunction, n_grid, theta1: float | None = None,
                   samples=None) -> ArcProfile:
    """Max prime-sum magnitude over minor-arc frequencies, per N."""
    if theta1 is None:
        theta1 = theta1_default(h.c)
    if not 0.0 < theta1 < (6.0 * h.c - 2.0) / 9.0:
        raise ValueError("theta1 outside (0, (6c-2)/9)")
    chi = chi_bound(h.c, theta1)
    n_grid = [float(n) for n in n_grid]
    if len(n_grid) < 2:
        raise ValueError("need at least two N values for a slope")
    all_xi, all_abs, maxima = [], [], []
    for n in n_grid:
        xs = (np.asarray(samples, dtype=np.float64) if samples is not None
              else sample_frequencies(n, theta1))
        if xs.size < 16:
            raise ValueError("need at least 16 frequency samples")
        mags = np.array([abs(prime_floor_sum(h, n, float(x)).value) for x in xs])
        all_xi.append(tuple(xs.tolist()))
        all_abs.append(tuple(mags.tolist()))
        maxima.append(float(mags.max()))
    slope = float(np.polyfit(np.log(n_grid), np.log(maxima), 1)[0])
    return ArcProfile(tuple(n_grid), float(theta1), float(chi), EPSILON,
                      tuple(all_xi), tuple(all_abs), tuple(maxima), slope)


# -- oscillatory integral ----------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def osc_integral(h: RegVarFunction, a: float, b: float, xi: float,
                 max_panels: int = 1 << 20) -> complex:
    """Integral of e(h(s) * xi) over [a, b] by phase-adaptive panels.

    Panel boundaries follow the inverse function so each panel carries at
    most a quarter cycle of phase; 16-point Gauss-Legendre then leaves
    error far below 1e-8 * (b - a).  Exceeding max_panels raises, which
    flags a frequency outside the intended major-arc regime.
    """
    a, b, xi = float(a), float(b), float(xi)
    if b <= a:
        return 0j
    if xi == 0.0:
        return complex(b - a)
    if xi < 0.0:
        return complex(np.conj(osc_integral(h, a, b, -xi, max_panels)))
    span = h.value(b) - h.value(a)
    n_panels = max(8, int(math.ceil(4.0 * xi * span)))
    if n_panels > max_panels:
        raise ValueError(f"panel budget exceeded: {n_panels} > {max_panels}; "
                         "|xi| too large for this window")
    inv = InverseHandle(h)
    cuts = np.linspace(h.value(a), h.value(b), n_panels + 1)
    edges = inv.value(cuts)
    edges[0], edges[-1] = a, b
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    hv = h.value(s.ravel()).reshape(s.shape)
    ph = np.exp((2j * math.pi) * (hv * xi - np.floor(hv * xi)))
    vals = (ph * _GL_WEIGHTS[None, :]).sum(axis=1) * half
    return complex(pairwise_sum(vals))


@dataclass(frozen=True)
class BlockCheck:
    t: float
    xi: float
    block_sum: complex
    integral: complex
    abs_error: float
    normalizer: float
    ratio: float
    epsilon: float


def dyadic_block_check(h: RegVarFunction, t: float, xi: float,
                       epsilon: float = EPSILON) -> BlockCheck:
    """Compare the Lambda-weighted block sum on (t/2, t] with the plain
    oscillatory integral, normalized subpolynomially."""
    t = float(t)
    lo, hi = int(math.floor(t / 2.0)), int(math.floor(t))
    lam = primes.von_mangoldt_range(lo + 1, hi + 1)
    n = np.flatnonzero(lam) + lo + 1
    w = lam[n - lo - 1]
    hv = h.value(n.astype(np.float64))
    arg = hv * xi
    ph = np.exp((2j * math.pi) * (arg - np.floor(arg)))
    block = complex(pairwise_sum(w * ph))
    integral = osc_integral(h, t / 2.0, t, xi)
    err = abs(block - integral)
    norm = normalizer(t, epsilon)
    return BlockCheck(t, float(xi), block, integral, err, norm, err / norm,
                      epsilon)


def fractional_min_sum(h: RegVarFunction, N: float, M: float) -> float:
    """Sum over n <= N of min(1, 1/(M * ||h(n)||))."""
    N, M = int(N), float(M)
    if M <= 0.0:
        raise ValueError("M must be positive")
    parts = []
    for lo, hi in chunked(N, _CHUNK):
        n = np.arange(lo + 1, hi + 1, dtype=np.float64)
        v = h.value(n)
        fr = v - np.floor(v)
        dist = np.minimum(fr, 1.0 - fr)
        with np.errstate(divide="ignore"):
            vals = np.minimum(1.0, 1.0 / (M * dist))
        parts.append(pairwise_sum(vals))
    return float(reduce_parts(parts))

"""Ternary representation counts along floors of regularly varying powers.

r(lambda) counts triples (m1, m2, m3) with floor(h1(m1)) + floor(h2(m2))
+ floor(h3(m3)) = lambda; R(lambda) is the same count over prime arguments
weighted by log(p1) log(p2) log(p3).  Both reduce to two convolutions of
per-function histograms, which keeps everything exact (64-bit integers
for r) and makes the full lambda range available at once.  The expected
main term is Gamma(g1) Gamma(g2) Gamma(g3) / Gamma(g1+g2+g3) *
lambda^2 phi1'(lambda) phi2'(lambda) phi3'(lambda) with gi = 1/ci.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expsum import EPSILON, guarded_floor
from .primes import primes_upto
from .regvar import InverseHandle, RegVarFunction

_INT64_CAP = 2 ** 62  # headroom under the signed 64-bit limit


def gamma_fn(x: float) -> float:
    """Euler Gamma on (0, 20], the range the main term needs."""
    if not 0.0 < x <= 20.0:
        raise ValueError(f"gamma_fn domain is (0, 20], got {x}")
    return math.gamma(x)


def assumption_check(gammas: tuple[float, float, float]) -> bool:
    """4(1-g1) + (45/4)(1-g2) + (45/4)(1-g3) < 1, the admissibility gate."""
    g1, g2, g3 = gammas
    return 4.0 * (1.0 - g1) + 11.25 * (1.0 - g2) + 11.25 * (1.0 - g3) < 1.0


@dataclass(frozen=True)
class WaringConfig:
    h1: RegVarFunction
    h2: RegVarFunction
    h3: RegVarFunction
    lambda_max: int

    def __post_init__(self):
        if self.lambda_max < 1:
            raise ValueError("lambda_max must be >= 1")

    @property
    def gammas(self) -> tuple[float, float, float]:
        return (self.h1.gamma, self.h2.gamma, self.h3.gamma)

    @property
    def functions(self) -> tuple[RegVarFunction, ...]:
        return (self.h1, self.h2, self.h3)

    def admissible(self) -> bool:
        # the asymptotic comparison additionally wants each c in (1, 4/3)
        return (all(f.c < 4.0 / 3.0 for f in self.functions)
                and assumption_check(self.gammas))


@dataclass(frozen=True)
class WaringCount:
    lam: int
    r: int
    R: float
    main_term: float
    ratio_r: float
    normalized_gap: float

    def __post_init__(self):
        if self.lam >= 0 and self.r < 0:
            raise ValueError("negative count")


def _arg_cutoff(h: RegVarFunction, lambda_max: int) -> int:
    # floor(h(m)) <= lambda_max forces m < phi(lambda_max + 1); one spare
    # index absorbs inverse roundoff, the floor mask does the exact cut
    inv = InverseHandle(h)
    return int(inv.value(float(lambda_max + 1))) + 1


def floor_image_histogram(h: RegVarFunction, lambda_max: int) -> np.ndarray:
    """g[s] = #{m >= 1 : floor(h(m)) = s} for 0 <= s <= lambda_max."""
    if lambda_max < 1:
        raise ValueError("lambda_max must be >= 1")
    m_max = _arg_cutoff(h, lambda_max)
    m = np.arange(1, m_max + 1, dtype=np.float64)
    floors, _ = guarded_floor(h, m)
    keep = floors <= lambda_max
    return np.bincount(floors[keep], minlength=lambda_max + 1).astype(np.int64)


def prime_weighted_histogram(h: RegVarFunction, lambda_max: int) -> np.ndarray:
    """w[s] = sum of log p over primes p with floor(h(p)) = s."""
    if lambda_max < 1:
        raise ValueError("lambda_max must be >= 1")
    m_max = _arg_cutoff(h, lambda_max)
    p = primes_upto(m_max).astype(np.float64)
    if p.size == 0:
        return np.zeros(lambda_max + 1)
    floors, _ = guarded_floor(h, p)
    keep = floors <= lambda_max
    return np.bincount(floors[keep], weights=np.log(p[keep]),
                       minlength=lambda_max + 1)


def _convolve_exact(a: np.ndarray, b: np.ndarray, out_len: int) -> np.ndarray:
    # int64 convolution with a pre-check that no coefficient can overflow
    bound = int(a.sum()) * int(b.max(initial=0))
    if bound >= _INT64_CAP:
        raise OverflowError(f"convolution coefficient bound {bound} "
                            f"exceeds the 64-bit guard")
    return np.convolve(a, b)[:out_len]


def triple_count(hist1: np.ndarray, hist2: np.ndarray, hist3: np.ndarray,
                 lam: int) -> int | float:
    """Coefficient of lambda in the threefold histogram convolution.

    Integer histograms stay exact end to end (guarded against overflow);
    real weighted histograms go through float convolution.
    """
    if lam < 0 or lam >= max(hist1.size + hist2.size + hist3.size - 2, 1):
        return 0
    full = triple_counts_all(hist1, hist2, hist3, lam)
    val = full[lam]
    return int(val) if np.issubdtype(full.dtype, np.integer) else float(val)


def triple_counts_all(hist1: np.ndarray, hist2: np.ndarray,
                      hist3: np.ndarray, lambda_max: int) -> np.ndarray:
    """All coefficients 0..lambda_max of the threefold convolution."""
    out_len = lambda_max + 1
    exact = all(np.issubdtype(h.dtype, np.integer)
                for h in (hist1, hist2, hist3))
    if exact:
        h12 = _convolve_exact(hist1[:out_len], hist2[:out_len], out_len)
        return _convolve_exact(h12, hist3[:out_len], out_len)
    a = np.convolve(hist1[:out_len].astype(np.float64),
                    hist2[:out_len].astype(np.float64))[:out_len]
    return np.convolve(a, hist3[:out_len].astype(np.float64))[:out_len]


def _phi_d1_product(config: WaringConfig, lam: float) -> float:
    prod = 1.0
    for f in config.functions:
        if lam < f.value(f.x0):
            raise ValueError(f"lambda={lam} below h(x0) for {f.label()}")
        prod *= InverseHandle(f).d1(float(lam))
    return prod


def gamma_constant(config: WaringConfig) -> float:
    g1, g2, g3 = config.gammas
    return (gamma_fn(g1) * gamma_fn(g2) * gamma_fn(g3)
            / gamma_fn(g1 + g2 + g3))


def main_term(config: WaringConfig, lam: float) -> float:
    """Gamma-factor constant times lambda^2 phi1' phi2' phi3' at lambda."""
    return gamma_constant(config) * lam * lam * _phi_d1_product(config, lam)


def count_report(config: WaringConfig, lams: list[int],
                 epsilon: float = EPSILON) -> list[WaringCount]:
    """r, R, main term, and the normalized r-vs-R gap at each requested lambda."""
    lmax = max(lams)
    if lmax > config.lambda_max:
        raise ValueError(f"lambda {lmax} beyond configured {config.lambda_max}")
    gs = [floor_image_histogram(f, lmax) for f in config.functions]
    ws = [prime_weighted_histogram(f, lmax) for f in config.functions]
    r_all = triple_counts_all(*gs, lmax)
    w_all = triple_counts_all(*ws, lmax)
    out = []
    for lam in lams:
        r = int(r_all[lam])
        R = float(w_all[lam])
        phis = lam * lam * _phi_d1_product(config, float(lam))
        mt = gamma_constant(config) * phis
        damp = math.exp(-math.log(lam) ** (1.0 / 3.0 - epsilon)) if lam > 1 else 1.0
        out.append(WaringCount(
            lam=lam, r=r, R=R, main_term=mt,
            ratio_r=r / mt if mt > 0 else math.inf,
            normalized_gap=abs(R - r) / (phis * damp)))
    return out

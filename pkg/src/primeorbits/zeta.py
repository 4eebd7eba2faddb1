"""Zeta zero tables, the truncated explicit formula, and zero-indexed sums.

The table is a plain ascending list of positive ordinates gamma with an
assumed common real part beta (default 1/2; every public table satisfies
that in its range).  On top of it sit the truncated Chebyshev-psi formula
and the two zero-indexed quantities used by the major-arc analysis: a
power-sum bound and an oscillatory integral summed over zeros up to a
height cut.

The oscillatory sum I(gamma) = int_{t/2}^t s^{beta-1} e(h(s) xi) s^{i gamma} ds
is evaluated by a Filon scheme in u = log s: the slow factor
f(u) = e^{beta u} e(xi h(e^u)) is projected on degree-16 Legendre pieces
over panels sized by the xi*h phase, and the e^{i gamma u} factor is
integrated exactly against each Legendre mode via spherical Bessel
moments.  One panel decomposition therefore serves every zero, which is
what makes height cuts in the tens of thousands affordable.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import spherical_jn

from .accum import pairwise_sum, reduce_parts
from .expsum import EPSILON, normalizer, theta1_default
from .regvar import RegVarFunction

_FIRST_GAMMA = 14.1347
_NODES_PER_PANEL = 17  # Gauss-Legendre; projection degree 16
_GL_U, _GL_W = np.polynomial.legendre.leggauss(_NODES_PER_PANEL)
# P_k(v_j) table reused by every projection
_LEG_VALS = np.polynomial.legendre.legvander(_GL_U, _NODES_PER_PANEL - 1)
_PROJ = _GL_W[:, None] * _LEG_VALS * (2.0 * np.arange(_NODES_PER_PANEL) + 1.0) / 2.0
_K_PARITY = np.where(np.arange(_NODES_PER_PANEL) % 2 == 0, 1.0, -1.0)
_MOMENT_PHASE = 2.0 * (1j ** np.arange(_NODES_PER_PANEL))

ZERO_TABLE_ENV = "PRIMEORBITS_ZERO_TABLE"


def theta3_default(c: float, theta1: float | None = None) -> float:
    """Height-cut exponent 1 - (1 - (c - theta1))/4 for the zero sums."""
    if theta1 is None:
        theta1 = theta1_default(c)
    return 1.0 - (1.0 - (c - theta1)) / 4.0


@dataclass(frozen=True)
class ZetaZeroTable:
    """Ascending positive zero ordinates with an assumed common real part."""

    gammas: np.ndarray
    source: str = "unknown"
    assumed_beta: float = 0.5

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=np.float64)
        object.__setattr__(self, "gammas", g)
        if g.size == 0:
            raise ValueError("empty zero table")
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite ordinate in zero table")
        if g[0] <= 0.0:
            raise ValueError("ordinates must be positive")
        if np.any(np.diff(g) <= 0.0):
            k = int(np.flatnonzero(np.diff(g) <= 0.0)[0])
            raise ValueError(f"ordinates not strictly ascending at index {k + 1}")
        if abs(g[0] - _FIRST_GAMMA) > 1e-4:
            raise ValueError(f"first ordinate {g[0]:.6f} is not the known "
                             f"lowest zero {_FIRST_GAMMA}")
        # counting-function sanity: N(T) stays below T log T on the range
        T = float(g[-1])
        if g.size > T * math.log(T):
            raise ValueError("zero count exceeds T log T at the table top")

    @property
    def count(self) -> int:
        return int(self.gammas.size)

    @property
    def max_gamma(self) -> float:
        return float(self.gammas[-1])

    def count_upto(self, T: float) -> int:
        """N(T): number of ordinates <= T."""
        return int(np.searchsorted(self.gammas, T, side="right"))


def _packaged_table_path() -> str:
    from importlib.resources import files

    return str(files("primeorbits").joinpath("data/zeta_zeros.txt"))


def load_zeros(path: str | None = None, assumed_beta: float = 0.5) -> ZetaZeroTable:
    """Read a zero table: one decimal ordinate per line, '#' comments.

    Resolution order: explicit path, then the PRIMEORBITS_ZERO_TABLE
    environment variable, then the packaged table.
    """
    source = path or os.environ.get(ZERO_TABLE_ENV) or _packaged_table_path()
    vals = []
    with open(source) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vals.append(float(line))
            except ValueError:
                raise ValueError(f"{source}: parse error at line {lineno}: "
                                 f"{line[:40]!r}") from None
    if not vals:
        raise ValueError(f"{source}: empty table")
    return ZetaZeroTable(np.array(vals), source=source, assumed_beta=assumed_beta)


def truncated_psi(x: float, T: float, table: ZetaZeroTable) -> float:
    """x - sum over 0<gamma<=T of 2 Re(x^rho / rho), rho = beta + i gamma.

    Conjugate pairs are folded analytically, so the result is real by
    construction; numerically it is exact up to the pairwise summation.
    """
    if not 2.0 <= T <= x:
        raise ValueError(f"need 2 <= T <= x, got T={T}, x={x}")
    if T > table.max_gamma:
        raise ValueError(f"T={T} beyond table coverage {table.max_gamma:.3f}")
    g = table.gammas[: table.count_upto(T)]
    if g.size == 0:
        return float(x)
    rho = table.assumed_beta + 1j * g
    terms = 2.0 * np.real(x ** table.assumed_beta
                          * np.exp(1j * g * math.log(x)) / rho)
    return float(x - pairwise_sum(terms))


@dataclass(frozen=True)
class ZeroSumBound:
    """A zero-indexed sum next to the target normalizer t e^{-(log t)^{1/3-eps}}."""

    value: complex
    n_zeros: int
    t: float
    normalizer: float
    n_panels: int = 0

    @property
    def ratio(self) -> float:
        return abs(self.value) / self.normalizer


def zero_power_sum(t: float, T1: float, table: ZetaZeroTable,
                   epsilon: float = EPSILON) -> ZeroSumBound:
    """(1/sqrt(T1)) * sum_{0<gamma<=T1} t^beta, against the normalizer.

    With a common assumed beta the sum collapses to N(T1) t^beta.
    """
    if not 1.0 <= T1 <= table.max_gamma:
        raise ValueError(f"need 1 <= T1 <= {table.max_gamma:.3f}, got {T1}")
    if t < 1.0:
        raise ValueError(f"need t >= 1, got {t}")
    n = table.count_upto(T1)
    value = n * t ** table.assumed_beta / math.sqrt(T1)
    return ZeroSumBound(value=value, n_zeros=n, t=t,
                        normalizer=normalizer(t, epsilon))


def _osc_panels(h: RegVarFunction, t: float, xi: float,
                max_panels: int) -> tuple[np.ndarray, float]:
    """Equal panels in u = log s, at least 4 per cycle of the xi*h phase."""
    cycles = abs(xi) * (h.value(t) - h.value(t / 2.0))
    n_panels = int(math.ceil(4.0 * cycles)) + 8
    if n_panels > max_panels:
        raise ValueError(f"quadrature budget exceeded: {n_panels} panels "
                         f"for xi={xi:g}, t={t:g} (cap {max_panels})")
    u0, u1 = math.log(t / 2.0), math.log(t)
    edges = np.linspace(u0, u1, n_panels + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (u1 - u0) / n_panels
    return centers, half


def zero_osc_sum(h: RegVarFunction, t: float, xi: float, T: float,
                 table: ZetaZeroTable, epsilon: float = EPSILON,
                 max_panels: int = 1 << 20, zero_chunk: int = 2048) -> ZeroSumBound:
    """Sum over zeros gamma <= T of int_{t/2}^t s^{rho-1} e(h(s) xi) ds,
    including the conjugate zero of each, against the normalizer.

    pre: t >= 2 x0 and |xi| <= t^{-theta1(c)} (major-arc regime).
    """
    if t < 2.0 * h.x0:
        raise ValueError(f"need t >= 2 x0 = {2.0 * h.x0:g}, got {t}")
    if abs(xi) > t ** (-theta1_default(h.c)) * (1.0 + 1e-12):
        raise ValueError(f"|xi|={abs(xi):g} outside the major arc at t={t:g}")
    if T > table.max_gamma:
        raise ValueError(f"T={T} beyond table coverage {table.max_gamma:.3f}")
    beta = table.assumed_beta
    g = table.gammas[: table.count_upto(T)]
    centers, half = _osc_panels(h, t, xi, max_panels)
    if g.size == 0:
        return ZeroSumBound(value=0.0 + 0.0j, n_zeros=0, t=t,
                            normalizer=normalizer(t, epsilon),
                            n_panels=centers.size)

    # degree-16 Legendre coefficients of f(u) = e^{beta u} e(xi h(e^u))
    u_nodes = centers[:, None] + half * _GL_U[None, :]
    f_nodes = np.exp(beta * u_nodes
                     + 2j * np.pi * xi * h.value(np.exp(u_nodes)))
    coeffs = f_nodes @ _PROJ  # panels x modes

    # moments: int_{-1}^{1} P_k(v) e^{i omega v} dv = 2 i^k j_k(omega)
    parts = []
    for lo in range(0, g.size, zero_chunk):
        gs = g[lo:lo + zero_chunk]
        omega = gs * half
        moments = np.empty((_NODES_PER_PANEL, gs.size), dtype=np.complex128)
        for k in range(_NODES_PER_PANEL):
            moments[k] = _MOMENT_PHASE[k] * spherical_jn(k, omega)
        carriers = np.exp(1j * np.outer(centers, gs))
        proj_pos = coeffs.T @ carriers            # modes x zeros, rho = beta+ig
        proj_neg = coeffs.T @ np.conj(carriers)   # conjugate zero beta-ig
        vals = half * ((proj_pos * moments).sum(axis=0)
                       + (proj_neg * moments * _K_PARITY[:, None]).sum(axis=0))
        parts.append(pairwise_sum(vals))
    total = reduce_parts(parts)
    return ZeroSumBound(value=complex(total), n_zeros=int(g.size), t=t,
                        normalizer=normalizer(t, epsilon),
                        n_panels=centers.size)

#!/usr/bin/env python3
"""Generate the bundled table of nontrivial zeta zero ordinates.

Ordinates below 1000 come straight from mpmath.mp.zetazero.  Above that
the Riemann-Siegel main sum plus leading correction is evaluated in
vectorized numpy; the residual correction terms are fitted once against
mpmath.fp.siegelz on a training sample (Chebyshev basis in the remainder
coordinate p, powers of (t/2pi)**-1/2), which brings zero locations to
a few 1e-6 absolute.  Sign changes on a fine grid are bisected; close
pairs that slip between grid points are repaired by comparing counts
against mpmath.mp.nzeros on a ladder of windows and pulling any stragglers
straight from mp.zetazero by index.  The result is validated two ways
before writing:

  * counts match mpmath.mp.nzeros exactly at a ladder of checkpoints;
  * sampled ordinates match mpmath.mp.zetazero to < 3e-4.

Usage: python scripts/generate_zero_table.py [T_MAX] [OUT_PATH]
"""

from __future__ import annotations

import hashlib
import sys
import time

import mpmath
import numpy as np

T_SPLIT = 1000.0  # below: mp.zetazero; above: fitted Riemann-Siegel
FIT_DEG_P = 24
FIT_POWS = (1, 2, 3)
GRID_FRACTION = 0.06  # of the local mean zero spacing
BISECT_ROUNDS = 44


def rs_theta(t: np.ndarray) -> np.ndarray:
    return (t / 2.0 * np.log(t / (2.0 * np.pi)) - t / 2.0 - np.pi / 8.0
            + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t ** 3))


def _psi_c0(p: np.ndarray) -> np.ndarray:
    # remove the p = 1/2 singularity of the ratio form by a tiny shift
    p = np.where(np.abs(p - 0.5) < 1e-7, p + 2e-7, p)
    return np.cos(2.0 * np.pi * (p * p - p - 1.0 / 16.0)) / np.cos(2.0 * np.pi * p)


def z_main(t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Main sum plus C0 term; returns (Z0, p, tau) for the fit layer."""
    tau = t / (2.0 * np.pi)
    a = np.sqrt(tau)
    nmax = a.astype(np.int64)
    p = a - nmax
    kmax = int(nmax.max())
    n = np.arange(1, kmax + 1, dtype=np.float64)
    th = rs_theta(t)
    acc = np.zeros_like(t)
    for lo in range(0, kmax, 128):
        nn = n[lo:lo + 128]
        mask = nn[None, :] <= nmax[:, None]
        acc += np.where(mask,
                        np.cos(th[:, None] - t[:, None] * np.log(nn)[None, :])
                        / np.sqrt(nn)[None, :], 0.0).sum(axis=1)
    sign = np.where(nmax % 2 == 1, 1.0, -1.0)
    z0 = 2.0 * acc + sign * tau ** (-0.25) * _psi_c0(p)
    return z0, p, tau


def _design(p: np.ndarray, tau: np.ndarray) -> np.ndarray:
    cheb = np.polynomial.chebyshev.chebvander(2.0 * p - 1.0, FIT_DEG_P - 1)
    u = tau ** (-0.5)
    cols = [cheb * (u ** k)[:, None] for k in FIT_POWS]
    return np.concatenate(cols, axis=1)


def fit_correction(rng: np.random.Generator, t_lo: float, t_hi: float,
                   n_train: int = 6000) -> np.ndarray:
    t = np.sort(rng.uniform(t_lo, t_hi, n_train))
    z0, p, tau = z_main(t)
    z_ref = np.array([mpmath.fp.siegelz(float(x)) for x in t])
    nmax = np.sqrt(tau).astype(np.int64)
    sign = np.where(nmax % 2 == 1, 1.0, -1.0)
    target = (z_ref - z0) * sign * tau ** 0.25
    coef, *_ = np.linalg.lstsq(_design(p, tau), target, rcond=None)
    resid = _design(p, tau) @ coef - target
    print(f"  fit rms {np.sqrt(np.mean(resid ** 2)):.2e} "
          f"max {np.max(np.abs(resid)):.2e} (scaled units)")
    return coef


_COEF: np.ndarray | None = None


def z_fit(t: np.ndarray) -> np.ndarray:
    z0, p, tau = z_main(t)
    nmax = np.sqrt(tau).astype(np.int64)
    sign = np.where(nmax % 2 == 1, 1.0, -1.0)
    return z0 + sign * tau ** (-0.25) * (_design(p, tau) @ _COEF)


def scan_range(t_lo: float, t_hi: float, fraction: float) -> np.ndarray:
    """Ordinates of sign changes of z_fit on [t_lo, t_hi]."""
    zeros = []
    t = t_lo
    while t < t_hi:
        step = fraction * 2.0 * np.pi / np.log(t / (2.0 * np.pi))
        hi = min(t + (1 << 16) * step, t_hi + step)
        grid = np.arange(t, hi, step)
        z = z_fit(grid)
        flip = np.flatnonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)
        lo_b, hi_b = grid[flip].copy(), grid[flip + 1].copy()
        z_lo = z[flip].copy()
        for _ in range(BISECT_ROUNDS):
            mid = 0.5 * (lo_b + hi_b)
            zm = z_fit(mid)
            take = np.sign(zm) == np.sign(z_lo)
            lo_b = np.where(take, mid, lo_b)
            z_lo = np.where(take, zm, z_lo)
            hi_b = np.where(take, hi_b, mid)
        zeros.append(0.5 * (lo_b + hi_b))
        if grid.size < 2:
            break
        t = grid[-1]
    out = np.concatenate(zeros) if zeros else np.empty(0)
    return out[(out >= t_lo) & (out <= t_hi)]


_NZ_CACHE: dict[float, int] = {}


def nz(T: float) -> int:
    """Exact zero count N(T) via mpmath, memoized (it is called on a ladder)."""
    r = _NZ_CACHE.get(T)
    if r is None:
        r = int(mpmath.mp.nzeros(T))
        _NZ_CACHE[T] = r
    return r


def _deficit_windows(zeros: np.ndarray, a: float, b: float,
                     out: list[tuple[float, float]]) -> None:
    """Recursively localize every window where the scan came up short."""
    want = nz(b) - nz(a)
    i0 = int(np.searchsorted(zeros, a, side="right"))
    i1 = int(np.searchsorted(zeros, b, side="right"))
    have = i1 - i0
    if have == want:
        return
    if have > want:
        raise AssertionError(
            f"surplus ordinates in ({a:.3f}, {b:.3f}]: {have} > {want}")
    if b - a <= 2.0:
        out.append((a, b))
        return
    m = 0.5 * (a + b)
    _deficit_windows(zeros, a, m, out)
    _deficit_windows(zeros, m, b, out)


def repair(zeros: np.ndarray, t_lo: float, t_hi: float) -> np.ndarray:
    """Make counts in (t_lo, t_hi] agree with mp.nzeros everywhere.

    Narrow deficient windows are replaced wholesale with exact ordinates
    from mp.zetazero (their indices are known from the counts), which is
    immune to sign-change blindness at nearly tangent close pairs.
    """
    ladder = np.arange(t_lo, t_hi, 500.0).tolist() + [t_hi]
    windows: list[tuple[float, float]] = []
    for a, b in zip(ladder[:-1], ladder[1:]):
        _deficit_windows(zeros, a, b, windows)
    if not windows:
        return zeros
    print(f"  repairing {len(windows)} deficient windows")
    keep = np.ones(zeros.size, dtype=bool)
    extras = []
    for a, b in windows:
        i0 = int(np.searchsorted(zeros, a, side="right"))
        i1 = int(np.searchsorted(zeros, b, side="right"))
        keep[i0:i1] = False
        exact = [float(mpmath.mp.zetazero(k).imag)
                 for k in range(nz(a) + 1, nz(b) + 1)]
        print(f"    ({a:.3f}, {b:.3f}]: had {i1 - i0}, replaced with "
              f"{len(exact)} exact ordinates")
        extras.append(np.array(exact))
    return np.sort(np.concatenate([zeros[keep]] + extras))


def main() -> None:
    t_max = float(sys.argv[1]) if len(sys.argv) > 1 else 45000.0
    out_path = sys.argv[2] if len(sys.argv) > 2 else "src/primeorbits/data/zeta_zeros.txt"
    rng = np.random.default_rng(20260817)
    t0 = time.time()

    n_prefix = int(mpmath.mp.nzeros(T_SPLIT))
    print(f"prefix: {n_prefix} ordinates below {T_SPLIT:g} via mp.zetazero")
    prefix = np.array([float(mpmath.mp.zetazero(n).imag)
                       for n in range(1, n_prefix + 1)])
    print(f"  done in {time.time() - t0:.1f}s")

    print("fitting Riemann-Siegel correction surface")
    global _COEF
    _COEF = fit_correction(rng, 0.9 * T_SPLIT, 1.02 * t_max)

    print(f"scanning ({T_SPLIT:g}, {t_max:g}]")
    body = scan_range(T_SPLIT, t_max, GRID_FRACTION)
    # merge any bisection twins before count comparison
    body = body[np.concatenate([[True], np.diff(body) > 1e-5])]
    zeros = np.concatenate([prefix, body])

    print("repairing against exact counts")
    zeros = repair(zeros, T_SPLIT, t_max)
    assert np.all(np.diff(zeros) > 1e-5), "duplicate ordinates after repair"

    # validation 1: exact counts at a checkpoint ladder
    print("validating counts against mp.nzeros")
    for T in [2000.0, 5000.0, 10000.0, 20000.0, 30000.0, 40000.0, t_max]:
        if T > t_max:
            continue
        want = int(mpmath.mp.nzeros(T))
        got = int(np.searchsorted(zeros, T, side="right"))
        print(f"  T={T:>8.0f}  found {got}  expected {want}")
        assert got == want, f"count mismatch at T={T}: {got} vs {want}"

    # validation 2: sampled ordinates against mp.zetazero
    print("spot-checking ordinates against mp.zetazero")
    idx = sorted(set(
        np.unique(np.geomspace(n_prefix + 1, zeros.size, 48).astype(int)).tolist()
        + [zeros.size]))
    worst = 0.0
    for n in idx:
        ref = float(mpmath.mp.zetazero(int(n)).imag)
        worst = max(worst, abs(ref - zeros[n - 1]))
    print(f"  max |delta| over {len(idx)} samples: {worst:.2e}")
    assert worst < 3e-4, f"spot check failed: {worst}"

    lines = [f"{g:.10f}" for g in zeros]
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()[:16]
    with open(out_path, "w") as fh:
        fh.write("# nontrivial zeta zero ordinates, ascending\n")
        fh.write(f"# count: {zeros.size}   max: {zeros[-1]:.6f}\n")
        fh.write(f"# below {T_SPLIT:g}: mpmath.mp.zetazero; above: "
                 "Riemann-Siegel scan, fitted correction, count-repaired\n")
        fh.write(f"# validation: counts match mp.nzeros at checkpoints; "
                 f"sampled mp.zetazero distance < {worst:.2e}\n")
        fh.write(f"# sha256[:16] of data lines: {digest}\n")
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {zeros.size} ordinates to {out_path} "
          f"in {time.time() - t0:.1f}s total")


if __name__ == "__main__":
    main()

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primeorbits.accum import (
    chunked,
    frac_mod1,
    kahan_sum,
    pairwise_sum,
    phase,
    reduce_parts,
    two_prod,
)


def test_pairwise_empty():
    assert pairwise_sum(np.array([], dtype=float)) == 0.0


def test_pairwise_matches_fsum_small():
    x = np.array([1.0, 1e-16, -1.0, 1e-16])
    # plain pairwise carries one rounding of the dominant partials
    assert abs(pairwise_sum(x) - math.fsum(x)) <= np.finfo(float).eps


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=3000))
@settings(max_examples=60, deadline=None)
def test_pairwise_matches_fsum(xs):
    x = np.array(xs)
    exact = math.fsum(xs)
    got = pairwise_sum(x)
    scale = max(1.0, float(np.abs(x).sum()))
    assert abs(got - exact) <= 1e-12 * scale


def test_pairwise_complex():
    rng = np.random.default_rng(7)
    z = rng.standard_normal(999) + 1j * rng.standard_normal(999)
    got = pairwise_sum(z)
    exact = complex(math.fsum(z.real), math.fsum(z.imag))
    assert abs(got - exact) < 1e-10


def test_pairwise_independent_of_padding():
    # same values split at different chunk boundaries agree exactly
    x = np.arange(1.0, 10001.0) ** -1.0
    whole = pairwise_sum(x)
    again = pairwise_sum(x.copy())
    assert whole == again


@given(st.lists(st.floats(min_value=-1e8, max_value=1e8), max_size=500))
@settings(max_examples=60, deadline=None)
def test_kahan_matches_fsum(xs):
    exact = math.fsum(xs)
    got = kahan_sum(xs)
    scale = max(1.0, math.fsum(abs(v) for v in xs))
    assert abs(got - exact) <= 1e-12 * scale


def test_kahan_compensation_kicks_in():
    # naive summation loses the small terms entirely
    vals = [1e16] + [1.0] * 1000 + [-1e16]
    assert kahan_sum(vals) == 1000.0


def test_reduce_parts_empty():
    assert reduce_parts([]) == 0.0


def test_reduce_parts_matches_sum():
    parts = [complex(i, -i) * 1e-3 for i in range(17)]
    got = reduce_parts(parts)
    exact = complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
    assert abs(got - exact) < 1e-12


def test_chunked_covers_range():
    spans = list(chunked(10, 3))
    assert spans == [(0, 3), (3, 6), (6, 9), (9, 10)]
    assert list(chunked(0)) == []


@given(
    st.integers(min_value=1, max_value=2**52),
    st.floats(min_value=-1.0, max_value=1.0),
)
@settings(max_examples=100, deadline=None)
def test_two_prod_exact(n, b):
    hi, lo = two_prod(np.array([float(n)]), b)
    # oracle: exact rational arithmetic
    exact = Fraction(n) * Fraction(b)
    err = (Fraction(float(hi[0])) + Fraction(float(lo[0]))) - exact
    assert err == 0


def test_frac_mod1_recovers_lost_bits():
    # n*xi ~ 1e12 so the naive product keeps only ~4 fractional bits
    n = np.array([1320964531.0])
    xi = 987.6543218765432
    import mpmath

    mpmath.mp.dps = 40
    exact = float(mpmath.frac(mpmath.mpf(int(n[0])) * mpmath.mpf(xi)))
    got = float(frac_mod1(n, xi)[0])
    assert abs(got - exact) < 1e-12
    naive = (n[0] * xi) % 1.0
    assert abs(naive - exact) > 1e-7  # the plain product really is broken here


def test_phase_conjugate_symmetry_bitwise():
    n = np.arange(1.0, 300.0)
    xi = 0.1234567890123
    plus = phase(n, xi)
    minus = phase(n, -xi)
    assert np.array_equal(minus, np.conj(plus))


def test_phase_unit_modulus():
    n = np.arange(1.0, 100.0)
    z = phase(n, 0.7071067811865476)
    assert np.max(np.abs(np.abs(z) - 1.0)) < 1e-15


def test_phase_zero_xi():
    n = np.arange(1.0, 50.0)
    assert np.array_equal(phase(n, 0.0), np.ones(49, dtype=complex))


@given(st.integers(min_value=1, max_value=10**9), st.floats(min_value=-0.5, max_value=0.5))
@settings(max_examples=50, deadline=None)
def test_phase_matches_mpmath(n, xi):
    import mpmath

    mpmath.mp.dps = 40
    want = mpmath.e ** (2j * mpmath.pi * mpmath.frac(mpmath.mpf(n) * mpmath.mpf(xi)))
    got = phase(np.array([float(n)]), xi)[0]
    assert abs(got - complex(want)) < 1e-12

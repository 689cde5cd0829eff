import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_zeta.core import ComplexLength, GeodesicClass, LengthSpectrum
from torsion_zeta.errors import BadWeight, NoGrowthConstants, NotConvergent, ValidationError
from torsion_zeta.models import cyclic_spectrum
from torsion_zeta.reps import SymmetricPowerOfLength
from torsion_zeta.zeta import (
    branching_sigma_p,
    casimir_shift,
    casimir_shift_general,
    complete_homogeneous,
    det_formula_exponents,
    log_euler_sum,
    restrict_exterior,
    ruelle_zeta,
    selberg_zeta,
    sigma_p_highest_weight,
    truncation_error_bound,
)


def test_empty_spectrum():
    res = ruelle_zeta(LengthSpectrum((), 5.0), s=1.0)
    assert res.value == 1.0 and res.abs_log_error == 0.0 and res.classes_used == 0


def test_single_primitive():
    spec = cyclic_spectrum(2.0, 0.0, 3.0, inverse_pair=False)
    res = ruelle_zeta(spec, s=1.0)
    assert res.value == pytest.approx(1 - math.exp(-2), abs=1e-12)
    assert res.classes_used == 1


def test_missing_growth():
    spec = cyclic_spectrum(2.0, 0.0, 3.0).with_growth(None)
    with pytest.raises(NoGrowthConstants):
        ruelle_zeta(spec, s=1.0)


def test_outside_region_flags_infinite_error():
    spec = cyclic_spectrum(2.0, 0.0, 10.0)
    res = ruelle_zeta(spec, s=0.1)
    assert math.isinf(res.abs_log_error)


def test_log_euler_partial_sum():
    spec = cyclic_spectrum(2.0, 0.0, 10.0, inverse_pair=False)
    res = log_euler_sum(spec, s=1.0)
    expected = -sum(math.exp(-2 * k) / k for k in range(1, 6))
    assert complex(np.log(res.value)).real == pytest.approx(expected, abs=1e-14)


def test_log_euler_scales_with_dimension():
    spec = cyclic_spectrum(2.0, 0.0, 10.0, inverse_pair=False)
    identity = {c.class_id: np.eye(3) for c in spec}
    one = np.log(log_euler_sum(spec, s=1.0).value)
    three = np.log(log_euler_sum(spec, identity, s=1.0, trace_growth=(3.0, 0.0)).value)
    assert three == pytest.approx(3 * one, rel=1e-13)


def test_log_euler_first_order():
    c = GeodesicClass("g", ComplexLength(6.0))
    spec = LengthSpectrum((c,), 6.0, growth=(1.0, 0.1))
    s = 1.0
    x = math.exp(-s * 6.0)
    assert abs(log_euler_sum(spec, s=s).value - (1 - x)) <= x * x


@settings(max_examples=50, deadline=None)
@given(st.floats(0.4, 2.5), st.floats(-3.0, 3.0), st.floats(0.3, 3.0), st.floats(-2, 2),
       st.integers(0, 3), st.integers(-2, 2))
def test_oracle_equivalence_cyclic(ell0, theta0, sr, si, m, sigma):
    spec = cyclic_spectrum(ell0, theta0, 12.0)
    rep = SymmetricPowerOfLength(m)
    s = complex(sr + m / 2.0 + 1.0 / ell0, si)
    a = ruelle_zeta(spec, rep, sigma, s)
    b = log_euler_sum(spec, rep, sigma, s)
    assert math.isfinite(a.abs_log_error)
    assert abs(a.value - b.value) <= 1e-10 * abs(a.value) + 2 * abs(a.value) * a.abs_log_error


def test_truncation_bound_example():
    val = truncation_error_bound(4.0, 0.0, 10.0, (1.0, 2.0), (1.0, 0.0))
    assert val == pytest.approx(2 * math.exp(-20), rel=1e-12)
    with pytest.raises(NotConvergent):
        truncation_error_bound(2.0, 0.0, 10.0, (1.0, 2.0), (1.0, 0.0))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.0, 20.0), st.floats(0.0, 20.0),
       st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_truncation_bound_monotone(kappa, l1, l2, g, c):
    s = g + c + kappa
    lo, hi = sorted((l1, l2))
    b_lo = truncation_error_bound(s, 0.0, lo, (1.0, g), (1.0, c))
    b_hi = truncation_error_bound(s, 0.0, hi, (1.0, g), (1.0, c))
    assert b_hi <= b_lo
    assert truncation_error_bound(s + 0.5, 0.0, lo, (1.0, g), (1.0, c)) <= b_lo


def test_truncation_bound_vanishes():
    vals = [truncation_error_bound(3.0, 0.0, L, (1.0, 1.0), (1.0, 0.0)) for L in (10, 100, 700)]
    assert vals[0] > vals[1] > vals[2] >= 0 and vals[2] < 1e-300


def test_selberg_k0_is_shifted_ruelle():
    spec = cyclic_spectrum(1.3, 0.7, 9.0)
    rep = SymmetricPowerOfLength(2)
    a = selberg_zeta(spec, rep, 1, 1.5 + 0.3j, k_max=0)
    b = ruelle_zeta(spec, rep, 1, 1.5 + 0.3j, shift=1.0)
    assert a.value == b.value


def test_selberg_degree_one_factor():
    c = GeodesicClass("g", ComplexLength(math.log(4)), holonomy_eigenvalues=(1, 1))
    spec = LengthSpectrum((c,), math.log(4), growth=(1.0, 0.1))
    k0 = selberg_zeta(spec, s=1.0, k_max=0).value
    k1 = selberg_zeta(spec, s=1.0, k_max=1).value
    assert k1 / k0 == pytest.approx((1 - 1 / 64) ** 2, abs=1e-14)
    assert (1 - 1 / 64) ** 2 == pytest.approx(0.9689941, abs=1e-7)


def test_selberg_k_tail_is_honored():
    spec = cyclic_spectrum(1.0, 0.4, 4.0)
    ref = selberg_zeta(spec, s=1.0, k_max=30).value
    for k in (1, 2, 4, 8):
        res = selberg_zeta(spec, s=1.0, k_max=k)
        # the length tail is the same for both; the k-tail is part of the bound
        assert abs(np.log(ref / res.value)) <= res.abs_log_error


def test_complete_homogeneous():
    a, b = 0.3 + 0.1j, -0.7j
    assert np.sum(complete_homogeneous([a, b], 2)) == pytest.approx(a * a + a * b + b * b)
    assert len(complete_homogeneous([1, 2, 3], 4)) == 15
    assert np.array_equal(complete_homogeneous([a, b], 0), [1.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=1.0), min_size=1, max_size=4),
       st.integers(1, 6))
def test_complete_homogeneous_newton(eigs, k):
    # k h_k = sum_{i=1}^k p_i h_{k-i}
    h = [np.sum(complete_homogeneous(eigs, j)) for j in range(k + 1)]
    p = [sum(x ** i for x in eigs) for i in range(k + 1)]
    rhs = sum(p[i] * h[k - i] for i in range(1, k + 1))
    assert abs(k * h[k] - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_exponent_table_examples():
    t = det_formula_exponents(3)
    assert set(t.entries) == {(0, 0, 1), (0, 1, 1), (0, 2, 1), (1, 1, -1), (1, 2, -1), (2, 2, 1)}
    t5 = det_formula_exponents(5)
    assert len(t5.entries) == 15
    assert all(sign == (-1) ** k for k, _, sign in t5.entries)
    for bad in (1, 4):
        with pytest.raises(ValidationError):
            det_formula_exponents(bad)


def test_branching_examples():
    assert branching_sigma_p(3, 0) == [(0, 1)]
    assert branching_sigma_p(3, 1) == [(1, 1), (0, -1)]
    assert branching_sigma_p(7, 3) == [(3, 1), (2, -1), (1, 1), (0, -1)]
    with pytest.raises(ValidationError):
        branching_sigma_p(3, 3)


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_branching_telescopes(d):
    for p in range(d):
        total = Counter()
        for j, sign in branching_sigma_p(d, p):
            for sig, mult in restrict_exterior(j).items():
                total[sig] += sign * mult
        assert {k: v for k, v in total.items() if v} == {p: 1}


def test_casimir_examples():
    assert casimir_shift(3, 0) == -1
    assert casimir_shift(3, 1) == 0
    assert casimir_shift_general(5, (1, 0)) == Fraction(-1)
    assert casimir_shift_general(5, sigma_p_highest_weight(5, 1)) == casimir_shift(5, 1)
    with pytest.raises(BadWeight):
        casimir_shift_general(5, (1,))

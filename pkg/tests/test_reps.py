import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_zeta.core import GroupPresentation, RepresentationSpec
from torsion_zeta.errors import IndexOutOfRange, NeedsSpectrum, ValidationError
from torsion_zeta.geodesics import enumerate_classes
from torsion_zeta.models import random_complex_matrix, random_unitary
from torsion_zeta.reps import (
    LocalFactorInput,
    cartan_twist,
    euler_factor,
    evaluate_word,
    symmetric_power_rep,
    symmetric_power_trace,
    trace_growth_constants,
)

A = np.array([[2.0, 1.0], [1.0, 1.0]], dtype=complex)
DIAG = np.diag([2.0, 0.5]).astype(complex)


def test_evaluate_word_examples():
    rep = RepresentationSpec((A,))
    assert np.array_equal(evaluate_word(rep, ()), np.eye(2))
    assert np.allclose(evaluate_word(rep, (1, -1)), np.eye(2), atol=1e-12)
    assert np.allclose(evaluate_word(rep, (1, 1)), A @ A)
    with pytest.raises(IndexOutOfRange):
        evaluate_word(rep, (2,))
    with pytest.raises(IndexOutOfRange):
        evaluate_word(rep, (0,))


def test_symmetric_power_trace_examples():
    assert symmetric_power_trace(3.7 + 1j, 0) == pytest.approx(1.0)
    assert symmetric_power_trace(2.0, 1) == pytest.approx(2.5)
    assert symmetric_power_trace(2.0, 2) == pytest.approx(5.25)
    # near +-1 the power-sum form takes over
    assert symmetric_power_trace(1.0 + 1e-9, 4) == pytest.approx(5.0)
    assert symmetric_power_trace(-1.0, 3) == pytest.approx(-4.0)


def test_symmetric_power_rep_examples():
    pres = GroupPresentation((A, DIAG))
    assert np.allclose(symmetric_power_rep(pres, 1).generator_images[0], A)
    assert np.allclose(symmetric_power_rep(pres, 2).generator_images[1], np.diag([4, 1, 0.25]))
    for img in symmetric_power_rep(pres, 0).generator_images:
        assert np.array_equal(img, np.eye(1))


def _random_sl2(rng):
    g = random_complex_matrix(rng, 2, 2)
    return g / np.sqrt(np.linalg.det(g))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_sym_power_traces_match_closed_form(seed, m):
    rng = np.random.default_rng(seed)
    g = _random_sl2(rng)
    lam = np.linalg.eigvals(g)[0]
    img = symmetric_power_rep(GroupPresentation((g,)), m).generator_images[0]
    expected = symmetric_power_trace(lam, m)
    assert abs(np.trace(img) - expected) <= 1e-8 * max(1.0, abs(expected))


def test_sym_power_is_homomorphism(rng):
    g, h = _random_sl2(rng), _random_sl2(rng)
    rep = symmetric_power_rep(GroupPresentation((g, h)), 3)
    direct = symmetric_power_rep(GroupPresentation((g @ h,)), 3).generator_images[0]
    assert np.allclose(evaluate_word(rep, (1, 2)), direct)


def test_cartan_twist_examples(rng):
    u = random_unitary(rng, 2, special=True)
    tw = cartan_twist(RepresentationSpec((u,)))
    assert np.allclose(tw.generator_images[0], u)
    tw = cartan_twist(RepresentationSpec((DIAG,)))
    assert np.allclose(tw.generator_images[0], np.diag([0.5, 2.0]))
    g = _random_sl2(rng)
    tw = cartan_twist(RepresentationSpec((g,)))
    assert np.trace(tw.generator_images[0]) == pytest.approx(np.conj(np.trace(g)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_cartan_twist_involution(seed, m):
    rng = np.random.default_rng(seed)
    pres = GroupPresentation((_random_sl2(rng), _random_sl2(rng)))
    rep = symmetric_power_rep(pres, m)
    back = cartan_twist(cartan_twist(rep))
    for a, b in zip(rep.generator_images, back.generator_images):
        assert np.allclose(a, b, atol=1e-12 * max(1.0, np.abs(a).max()))
    plain = RepresentationSpec(pres.generators)
    for a, b in zip(plain.generator_images, cartan_twist(cartan_twist(plain)).generator_images):
        assert np.allclose(a, b, atol=1e-12)


def test_trace_growth_examples(rng):
    assert trace_growth_constants(None) == (1.0, 0.0)
    assert trace_growth_constants(RepresentationSpec((np.eye(1),))) == (1.0, 0.0)
    u = random_unitary(rng, 3)
    assert trace_growth_constants(RepresentationSpec((u,), unitary_flag=True)) == (3.0, 0.0)


def test_trace_growth_diagonal_three():
    g = np.diag([3.0, 1 / 3])
    pres = GroupPresentation((g,))
    spec = enumerate_classes(pres, 4, 12.0)
    rep = RepresentationSpec((g,))
    big_c, c = trace_growth_constants(rep, pres, spec)
    ell0 = 2 * math.log(3)
    assert min(p.ell for p in spec.primitives()) == pytest.approx(ell0)
    assert c == pytest.approx(0.5)
    for k in range(1, 8):
        assert 3.0 ** k + 3.0 ** -k <= big_c * math.exp(c * k * ell0) * (1 + 1e-12)


def test_trace_growth_needs_spectrum():
    with pytest.raises(NeedsSpectrum):
        trace_growth_constants(RepresentationSpec((DIAG,)))


def test_trace_growth_bound_holds_on_classes(rng):
    g1, g2 = _random_sl2(rng) * 1.0, _random_sl2(rng)
    g1 = g1 @ np.diag([3.0, 1 / 3]) @ np.linalg.inv(g1)
    g2 = g2 @ np.diag([2.5j, -0.4j]) @ np.linalg.inv(g2)
    pres = GroupPresentation((g1, g2))
    spec = enumerate_classes(pres, 4, 8.0)
    rep = symmetric_power_rep(pres, 2)
    big_c, c = trace_growth_constants(rep, pres, spec)
    for cls in spec:
        tr = abs(np.trace(evaluate_word(rep, cls.word)))
        assert tr <= big_c * math.exp(c * cls.ell) * (1 + 1e-9)


def test_euler_factor_examples():
    one = np.ones(1)
    assert euler_factor(LocalFactorInput(one, 1.0, math.log(2))) == pytest.approx(0.5)
    f = euler_factor(LocalFactorInput(np.diag([3.0, 1 / 3]), 1.0, 2 * math.log(3)))
    assert f == pytest.approx(52 / 81)
    f = euler_factor(LocalFactorInput(one, 1.0, math.log(2), sigma_value=-1.0))
    assert f == pytest.approx(1.5)
    with pytest.raises(ValidationError):
        LocalFactorInput(one, 1.0, 1.0, sigma_value=1.5)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1.0, 3.0), st.floats(-3.0, 3.0))
def test_matrix_factor_equals_eigenvalue_product(seed, zr, zi):
    rng = np.random.default_rng(seed)
    a = random_complex_matrix(rng, 4, 4)
    s = complex(zr, zi)
    from_matrix = euler_factor(LocalFactorInput(a, 1.0, s))
    from_eigs = euler_factor(LocalFactorInput(np.linalg.eigvals(a), 1.0, s))
    assert abs(from_matrix - from_eigs) <= 1e-9 * max(1.0, abs(from_matrix))

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_zeta.core import (
    ComplexLength,
    GeodesicClass,
    GroupPresentation,
    LengthSpectrum,
    loads_presentation,
    validate_spectrum,
)
from torsion_zeta.errors import (
    BudgetExceeded,
    CutoffExceeded,
    DimensionMismatch,
    NotLoxodromic,
)
from torsion_zeta.geodesics import (
    ad_restricted_eigenvalues,
    complex_length_of,
    counting_function,
    cyclic_key,
    enumerate_classes,
    primitive_decompose,
    word_root,
)
from torsion_zeta.models import cyclic_spectrum
from torsion_zeta.verify import load_fixture

E = math.e
CYCLIC = GroupPresentation((np.diag([E, 1 / E]),))


@pytest.fixture(scope="module")
def two_generator():
    pres = loads_presentation(load_fixture("two_generator.json"))
    return pres, enumerate_classes(pres, 6, 8.0)


def test_complex_length_examples():
    c = complex_length_of(np.diag([E, 1 / E]))
    assert c.ell == pytest.approx(2.0, abs=1e-12) and c.theta == pytest.approx(0.0, abs=1e-12)
    c = complex_length_of(np.diag([2j, -0.5j]))
    assert c.ell == pytest.approx(2 * math.log(2), abs=1e-12)
    assert c.theta == pytest.approx(math.pi, abs=1e-12)
    c = complex_length_of(np.array([[2.0, 1.0], [1.0, 1.0]]))
    assert c.ell == pytest.approx(1.9248473, abs=1e-7)
    assert c.theta == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("g", [np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]]),
                               np.array([[0.0, -1.0], [1.0, 0.0]])])
def test_not_loxodromic(g):
    with pytest.raises(NotLoxodromic):
        complex_length_of(g)


def test_cyclic_enumeration_merged():
    spec = enumerate_classes(CYCLIC, 3, 6.0, merge_inverses=True)
    assert [round(c.ell, 12) for c in spec] == [2.0, 4.0, 6.0]
    assert [c.power for c in spec] == [1, 2, 3]
    prim = spec.classes[0].class_id
    assert all(c.primitive_id == prim for c in spec)


def test_enumeration_closes_under_powers():
    # words of length <= 3 give g, g^2, g^3; g^4 and g^5 are added as powers
    spec = enumerate_classes(CYCLIC, 3, 10.0, merge_inverses=True)
    assert [round(c.ell, 12) for c in spec] == [2.0, 4.0, 6.0, 8.0, 10.0]
    assert [c.power for c in spec] == [1, 2, 3, 4, 5]
    prim = spec.classes[0].class_id
    assert all(c.primitive_id == prim for c in spec)
    assert validate_spectrum(spec) == []


def test_cyclic_enumeration_keeps_inverses_by_default():
    spec = enumerate_classes(CYCLIC, 3, 6.0)
    assert len(spec) == 6
    assert len(spec.primitives()) == 2
    assert validate_spectrum(spec) == []


def test_cutoff_filter():
    spec = enumerate_classes(CYCLIC, 3, 3.0, merge_inverses=True)
    assert [c.ell for c in spec] == pytest.approx([2.0])


def test_empty_generators():
    spec = enumerate_classes(GroupPresentation(()), 4, 10.0)
    assert len(spec) == 0


def test_budget_exceeded(two_generator):
    pres, _ = two_generator
    with pytest.raises(BudgetExceeded):
        enumerate_classes(pres, 8, 10.0, node_limit=100)


def test_word_helpers():
    assert cyclic_key((2, 1, 1)) == (1, 1, 2)
    assert word_root((1, 2, 1, 2)) == ((1, 2), 2)
    assert word_root((1, 2, 2)) == ((1, 2, 2), 1)


def _cls(cid, ell, theta=0.0):
    return GeodesicClass(cid, ComplexLength(ell, theta),
                         holonomy_eigenvalues=(np.exp(1j * theta), np.exp(-1j * theta)))


@pytest.mark.parametrize("theta0", [0.0, math.pi])
def test_primitive_decompose_doubling(theta0):
    spec = LengthSpectrum((_cls("a", 2.0, theta0), _cls("b", 4.0, 0.0)), 5.0)
    out = primitive_decompose(spec).by_id()
    assert out["b"].power == 2 and out["b"].primitive_id == "a"


def test_primitive_decompose_single():
    out = primitive_decompose(LengthSpectrum((_cls("a", 2.0),), 3.0)).classes[0]
    assert out.power == 1 and out.is_primitive


def test_counting_function():
    spec = cyclic_spectrum(2.0, 0.0, 10.0, inverse_pair=False)
    assert counting_function(spec, 5.0) == 2
    assert counting_function(spec, 0.0) == 0
    assert counting_function(spec, spec.cutoff) == len(spec)
    with pytest.raises(CutoffExceeded):
        counting_function(spec, 11.0)


def test_ad_restricted_eigenvalues():
    c = _cls("a", math.log(2), 0.0)
    assert np.allclose(ad_restricted_eigenvalues(c, 3), [0.5, 0.5])
    c = _cls("a", math.log(2), math.pi / 2)
    assert np.allclose(sorted(ad_restricted_eigenvalues(c, 3), key=lambda z: z.imag),
                       [-0.5j, 0.5j])
    c5 = GeodesicClass("b", ComplexLength(1.0), holonomy_eigenvalues=(1, 1, 1j, -1j))
    assert np.allclose(ad_restricted_eigenvalues(c5, 5), np.array([1, 1, 1j, -1j]) / E)
    with pytest.raises(DimensionMismatch):
        ad_restricted_eigenvalues(c5, 3)


def test_enumerated_lengths_match_words(two_generator):
    pres, spec = two_generator
    gens = pres.generators
    invs = [np.linalg.inv(g) for g in gens]
    for c in spec:
        m = np.eye(2)
        for w in c.word:
            m = m @ (gens[w - 1] if w > 0 else invs[-w - 1])
        clen = complex_length_of(m)
        assert abs(clen.ell - c.ell) <= 1e-9
        diff = abs(clen.theta - c.theta) % (2 * math.pi)
        assert min(diff, 2 * math.pi - diff) <= 1e-9


def test_enumerated_powers_consistent(two_generator):
    _, spec = two_generator
    assert validate_spectrum(spec) == []
    ids = spec.by_id()
    for c in spec:
        p = ids[c.primitive_id]
        assert c.ell == pytest.approx(c.power * p.ell, abs=1e-9)
        for u, v in zip(sorted(c.holonomy_eigenvalues, key=np.angle),
                        sorted((z ** c.power for z in p.holonomy_eigenvalues), key=np.angle)):
            assert abs(u - v) <= 1e-9


def test_enumeration_deterministic(two_generator):
    pres, spec = two_generator
    again = enumerate_classes(pres, 6, 8.0)
    assert [(c.class_id, c.word) for c in again] == [(c.class_id, c.word) for c in spec]


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 8.0), st.floats(0.0, 8.0))
def test_counting_monotone(r1, r2):
    spec = cyclic_spectrum(0.7, 1.0, 8.0)
    lo, hi = sorted((r1, r2))
    assert counting_function(spec, lo) <= counting_function(spec, hi)

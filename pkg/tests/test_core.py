import json
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
    RepresentationSpec,
    dumps_presentation,
    dumps_representation,
    dumps_spectrum,
    loads_presentation,
    loads_representation,
    loads_spectrum,
    normalize_angle,
    validate_spectrum,
)
from torsion_zeta.errors import FormatError, ValidationError
from torsion_zeta.models import cyclic_spectrum


def _cls(cid, ell, theta=0.0, power=1, prim=None, hol=None):
    if hol is None:
        hol = (np.exp(1j * theta), np.exp(-1j * theta))
    return GeodesicClass(cid, ComplexLength(ell, theta), power, prim, hol)


def test_consistent_powers_have_no_violations():
    spec = LengthSpectrum((_cls("g", 2.0), _cls("g2", 4.0, power=2, prim="g")), 5.0)
    assert validate_spectrum(spec) == []


def test_missing_power_reported_once():
    spec = LengthSpectrum((_cls("g", 2.0),), 5.0)
    report = validate_spectrum(spec)
    assert len(report) == 1
    assert report[0].invariant == "missing power"


def test_non_unit_holonomy_reported():
    spec = LengthSpectrum((_cls("g", 2.0, hol=(1.1, 1 / 1.1)),), 3.0)
    report = validate_spectrum(spec)
    assert [v.invariant for v in report] == ["non-unit holonomy"]


def test_duplicate_id_and_length_mismatch():
    spec = LengthSpectrum((_cls("g", 2.0), _cls("g", 2.5), _cls("h", 4.1, power=2, prim="g")),
                          5.0)
    kinds = {v.invariant for v in validate_spectrum(spec)}
    assert "duplicate id" in kinds


def test_power_length_mismatch():
    spec = LengthSpectrum((_cls("g", 2.0), _cls("g2", 4.1, power=2, prim="g")), 5.0)
    kinds = {v.invariant for v in validate_spectrum(spec)}
    assert "power length mismatch" in kinds


def test_complex_length_rejects_nonpositive():
    with pytest.raises(ValidationError):
        ComplexLength(0.0, 1.0)


def test_theta_is_normalized():
    assert ComplexLength(1.0, -math.pi / 2).theta == pytest.approx(3 * math.pi / 2)
    assert ComplexLength(1.0, 2 * math.pi).theta == 0.0
    assert 0.0 <= normalize_angle(-1e-300) < 2 * math.pi


def test_even_dimension_rejected():
    with pytest.raises(ValidationError):
        LengthSpectrum((), 1.0, dim=4)


def test_presentation_requires_unit_determinant():
    with pytest.raises(ValidationError):
        GroupPresentation((np.diag([2.0, 1.0]),))


def test_unitary_flag_checked():
    with pytest.raises(ValidationError):
        RepresentationSpec((np.diag([2.0, 0.5]),), unitary_flag=True)


def test_singular_image_rejected():
    with pytest.raises(ValidationError):
        RepresentationSpec((np.zeros((2, 2)),))


spectra = st.builds(
    lambda ell0, theta0, cutoff, pair: cyclic_spectrum(ell0, theta0, cutoff, pair),
    st.floats(0.3, 3.0), st.floats(-7.0, 7.0), st.floats(0.5, 12.0), st.booleans(),
)


@settings(max_examples=40, deadline=None)
@given(spectra)
def test_spectrum_round_trip_is_byte_identical(spec):
    text = dumps_spectrum(spec)
    assert dumps_spectrum(loads_spectrum(text)) == text


@settings(max_examples=40, deadline=None)
@given(spectra)
def test_generated_spectra_are_consistent(spec):
    assert validate_spectrum(spec) == []


@settings(max_examples=40, deadline=None)
@given(spectra, st.randoms(use_true_random=False))
def test_validation_idempotent_and_order_insensitive(spec, rnd):
    # drop one class to create violations, then shuffle
    classes = list(spec.classes)
    if classes:
        classes.pop(rnd.randrange(len(classes)))
    broken = LengthSpectrum(tuple(classes), spec.cutoff, spec.dim, spec.growth)
    first = validate_spectrum(broken)
    assert validate_spectrum(broken) == first
    rnd.shuffle(classes)
    shuffled = LengthSpectrum(tuple(classes), spec.cutoff, spec.dim, spec.growth)
    assert validate_spectrum(shuffled) == first


def test_spectrum_header_required():
    with pytest.raises(FormatError):
        loads_spectrum('{"dim": 3, "cutoff": 1.0}\n')
    with pytest.raises(FormatError):
        loads_spectrum("")


def test_representation_round_trip():
    a = np.array([[1.0 + 2j, 0.5], [0.0, 3.0 - 1j]])
    rep = RepresentationSpec((a, np.eye(2)), growth_constants=(2.0, 0.5))
    back = loads_representation(dumps_representation(rep))
    assert np.array_equal(back.generator_images[0], a)
    assert back.growth_constants == (2.0, 0.5)


def test_representation_accepts_nested_rows():
    text = json.dumps({"format": "rep.v1", "dim_rep": 2,
                       "generators": [[[[2, 0], [0, 0]], [[0, 0], [0.5, 0]]]]})
    rep = loads_representation(text)
    assert np.allclose(rep.generator_images[0], np.diag([2.0, 0.5]))


def test_presentation_round_trip():
    g = np.array([[2.0, 1.0], [1.0, 1.0]])
    pres = GroupPresentation((g,), ((1, 1, -1, -1),))
    back = loads_presentation(dumps_presentation(pres))
    assert np.array_equal(back.generators[0], g)
    assert back.relators == ((1, 1, -1, -1),)

"""Zeta-regularized determinants of finite, possibly non-self-adjoint spectra.

Branches
--------
For an angle ``theta`` the logarithm ``log_theta(lam)`` has imaginary
part in ``(theta, theta + 2 pi)``. With ``lam^{-s} = exp(-s log_theta lam)``
a finite spectrum has the entire zeta function

    zeta_theta(s) = sum_k m_k exp(-s log_theta lam_k),

so ``zeta_theta'(0) = -sum_k m_k log_theta lam_k`` and

    det_theta = exp(-zeta_theta'(0)) = exp(sum_k m_k log_theta lam_k).

Moving ``theta`` across an eigenvalue changes its logarithm by ``2 pi i``;
the multiplicities are integers, so the determinant does not depend on the
admissible angle (the zeta function itself does).

Spectra with a tail
-------------------
When only the bottom of an infinite spectrum is listed, the small-time
heat expansion ``Theta(t) ~ sum_j a_j t^{(j - d)/2}`` supplies the rest.
Writing ``A(t)`` for the expansion and ``alpha_j = (j - d)/2``,

    zeta'(0) = int_0^1 (Theta - A)/t dt + int_1^oo Theta/t dt
               + sum_{alpha_j != 0} a_j / alpha_j + gamma_E a_{j0},

where ``j0`` is the index with ``alpha = 0`` (``zeta(0) = a_{j0}``). Below a
cut ``t*`` the listed eigenvalues cannot resolve ``Theta`` and ``Theta - A``
is taken to vanish; above it the omitted eigenvalues are negligible. This
uses the principal logarithm, which is the ``theta = pi`` determinant.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .core import TWO_PI, normalize_angle
from .errors import (
    FormatError,
    MissingTail,
    OnCut,
    ROnSpectrum,
    SpectrumNotPositive,
    ValidationError,
    ZeroEigenvalue,
)

__all__ = [
    "TailModel",
    "SpectralData",
    "AgmonAngle",
    "DetEstimate",
    "sector_check",
    "agmon_angle",
    "log_branch",
    "zeta_function",
    "heat_trace",
    "reg_det_finite",
    "reg_det_with_tail",
    "zeta_at_zero",
    "graded_det",
    "prime_det_product",
    "scaled",
    "dumps_spectral_data",
    "loads_spectral_data",
    "read_spectral_data",
]

CUT_TOL = 1e-13
EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class TailModel:
    """Small-time heat coefficients of the full spectrum.

    ``heat_coeffs[j]`` multiplies ``t^{(j - weyl_dim)/2}``. An empty list
    declares the listed items to be the whole spectrum.
    """

    weyl_dim: int
    heat_coeffs: tuple[float, ...] = ()
    tail_start: float | None = None

    def __post_init__(self):
        if int(self.weyl_dim) != self.weyl_dim or self.weyl_dim < 1:
            raise ValidationError("weyl_dim must be a positive integer")
        coeffs = tuple(float(a) for a in self.heat_coeffs)
        if not all(math.isfinite(a) for a in coeffs):
            raise ValidationError("heat coefficients must be finite")
        object.__setattr__(self, "heat_coeffs", coeffs)

    def exponents(self) -> list[float]:
        return [(j - self.weyl_dim) / 2.0 for j in range(len(self.heat_coeffs))]


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues with algebraic multiplicities, sorted by real then imaginary part."""

    items: tuple[tuple[complex, int], ...]
    tail: TailModel | None = None

    def __post_init__(self):
        clean = []
        for lam, m in self.items:
            if int(m) != m or m < 1:
                raise ValidationError(f"multiplicity of {lam} must be a positive integer")
            clean.append((complex(lam), int(m)))
        clean.sort(key=lambda it: (it[0].real, it[0].imag))
        object.__setattr__(self, "items", tuple(clean))

    @classmethod
    def from_values(cls, values, tail: TailModel | None = None) -> "SpectralData":
        """Build from a flat list of eigenvalues, one item per entry."""
        return cls(tuple((v, 1) for v in values), tail)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.items], dtype=complex)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.items], dtype=int)

    @property
    def total_multiplicity(self) -> int:
        return int(sum(m for _, m in self.items))

    def without_tail(self) -> "SpectralData":
        return SpectralData(self.items, None)

    def union(self, other: "SpectralData") -> "SpectralData":
        return SpectralData(self.items + other.items, None)

    def restrict_real(self, r: float, below: bool) -> "SpectralData":
        keep = [(lam, m) for lam, m in self.items if (lam.real < r) == below]
        return SpectralData(tuple(keep), None)


@dataclass(frozen=True)
class AgmonAngle:
    theta: float
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class DetEstimate:
    """A determinant with a bound on the error of its logarithm."""

    value: complex
    abs_log_error: float
    zeta_prime_0: complex = field(default=0j)


def _angle_distance(a: float, b: float) -> float:
    diff = math.fmod(abs(a - b), TWO_PI)
    return min(diff, TWO_PI - diff)


def sector_check(spec: SpectralData, theta: float, epsilon: float) -> bool:
    """True iff no nonzero eigenvalue has argument within ``epsilon`` of ``theta``."""
    for lam, _ in spec.items:
        if lam == 0:
            continue
        if _angle_distance(cmath.phase(lam), theta) <= epsilon:
            return False
    return True


def agmon_angle(spec: SpectralData, prefer: float = math.pi) -> AgmonAngle:
    """An admissible angle, ``prefer`` if possible, else the middle of the widest gap."""
    args = sorted(normalize_angle(cmath.phase(lam)) for lam, _ in spec.items if lam != 0)
    if not args:
        return AgmonAngle(prefer, math.pi / 2)
    gaps = [(args[(i + 1) % len(args)] - a) % TWO_PI or TWO_PI for i, a in enumerate(args)]
    width = max(gaps)
    dist = min(_angle_distance(prefer, a) for a in args)
    if dist > 1e-6:
        return AgmonAngle(prefer, dist / 2)
    i = gaps.index(width)
    return AgmonAngle(args[i] + width / 2, width / 4)


def log_branch(lam: complex, theta: float) -> complex:
    """Logarithm with imaginary part in ``(theta, theta + 2 pi)``.

    Raises
    ------
    OnCut
        If ``arg(lam)`` equals ``theta`` modulo ``2 pi``.
    ZeroEigenvalue
        If ``lam == 0``.
    """
    lam = complex(lam)
    if lam == 0:
        raise ZeroEigenvalue("log of zero")
    offset = math.fmod(cmath.phase(lam) - theta, TWO_PI)
    if offset < 0:
        offset += TWO_PI
    if offset <= CUT_TOL or offset >= TWO_PI - CUT_TOL:
        raise OnCut(f"{lam} lies on the ray of angle {theta}")
    return complex(math.log(abs(lam)), theta + offset)


def _require_nonzero(spec: SpectralData):
    for lam, _ in spec.items:
        if lam == 0:
            raise ZeroEigenvalue("remove zero modes before taking determinants")


def zeta_function(spec: SpectralData, theta: float, s: complex) -> complex:
    """``sum_k m_k exp(-s log_theta lam_k)`` for a finite spectrum."""
    _require_nonzero(spec)
    s = complex(s)
    return sum(m * cmath.exp(-s * log_branch(lam, theta)) for lam, m in spec.items)


def heat_trace(spec: SpectralData, t: float) -> complex:
    """``sum_k m_k exp(-t lam_k)`` over the listed items."""
    if not t > 0:
        raise ValidationError("t must be positive")
    lams, mults = spec.eigenvalues, spec.multiplicities
    return complex(np.sum(mults * np.exp(-t * lams)))


def reg_det_finite(spec: SpectralData, theta: float = math.pi) -> complex:
    """``exp(sum_k m_k log_theta lam_k)``; independent of the admissible ``theta``."""
    _require_nonzero(spec)
    re = math.fsum(m * math.log(abs(lam)) for lam, m in spec.items)
    # reduce each phase mod 2 pi first; integer multiples of 2 pi i drop out
    im = math.fsum(m * math.fmod(log_branch(lam, theta).imag, TWO_PI) for lam, m in spec.items)
    return cmath.exp(complex(re, math.fmod(im, TWO_PI)))


def zeta_at_zero(spec: SpectralData) -> float:
    """``zeta(0)``: the ``t^0`` heat coefficient, or the multiplicity for finite data."""
    tail = spec.tail
    if tail is None or not tail.heat_coeffs:
        return float(spec.total_multiplicity)
    for a, alpha in zip(tail.heat_coeffs, tail.exponents()):
        if alpha == 0:
            return a
    return 0.0


def _quad_complex(f, a, b):
    re, e1 = integrate.quad(lambda x: f(x).real, a, b, limit=400, epsabs=1e-13, epsrel=1e-12)
    im, e2 = integrate.quad(lambda x: f(x).imag, a, b, limit=400, epsabs=1e-13, epsrel=1e-12)
    return complex(re, im), e1 + e2


def reg_det_with_tail(spec: SpectralData, theta: float = math.pi) -> DetEstimate:
    """Determinant from the split Mellin integral.

    Parameters
    ----------
    spec : SpectralData
        Items with ``Re(lam) > 0`` and a tail model. An empty coefficient
        list means the items are the whole spectrum.
    theta : float
        Only used to check that the spectrum avoids the cut.

    Raises
    ------
    MissingTail
        If ``spec.tail`` is ``None``.
    SpectrumNotPositive
        If some ``Re(lam) <= 0``.
    """
    if spec.tail is None:
        raise MissingTail("attach a TailModel (empty heat_coeffs for a finite spectrum)")
    if not spec.items:
        raise ValidationError("no eigenvalues listed")
    lams = spec.eigenvalues
    mults = spec.multiplicities.astype(float)
    delta = float(lams.real.min())
    if not delta > 0:
        raise SpectrumNotPositive(f"smallest real part is {delta}")
    if not sector_check(spec, theta, 0.0):
        raise OnCut(f"an eigenvalue lies on the ray of angle {theta}")

    tail = spec.tail
    if tail.heat_coeffs:
        coeffs = list(tail.heat_coeffs)
        alphas = tail.exponents()
        top = float(lams.real.max())
        t_cut = min(1.0, (math.log(mults.sum() / 1e-16) + 10.0) / top)
    else:
        coeffs, alphas = [float(mults.sum())], [0.0]
        t_cut = 0.0

    def theta_listed(t):
        return complex(np.sum(mults * np.exp(-t * lams)))

    def expansion(t):
        return sum(a * t ** al for a, al in zip(coeffs, alphas))

    err = 0.0
    if t_cut > 0:
        # u = log t turns dt/t into du and tames the t^alpha growth near t*
        low, e = _quad_complex(
            lambda u: theta_listed(math.exp(u)) - expansion(math.exp(u)), math.log(t_cut), 0.0)
    else:
        low, e = _quad_complex(lambda t: (theta_listed(t) - expansion(t)) / t, 0.0, 1.0)
    err += e
    # the heat trace decays like N exp(-delta t); stop once that is below 1e-17
    t_end = 1.0 + max(0.0, math.log(mults.sum() / 1e-17)) / delta
    high, e = _quad_complex(lambda t: theta_listed(t) / t, 1.0, t_end)
    err += e + mults.sum() * math.exp(-delta * t_end) / (delta * t_end)

    const = 0.0
    for a, al in zip(coeffs, alphas):
        const += EULER_GAMMA * a if al == 0 else a / al
    zp = low + high + const
    return DetEstimate(cmath.exp(-zp), float(err), zp)


def graded_det(plus: SpectralData, minus: SpectralData, theta: float = math.pi) -> complex:
    """``det(plus) / det(minus)``."""
    return reg_det_finite(plus, theta) / reg_det_finite(minus, theta)


def prime_det_product(spec: SpectralData, r: float) -> complex:
    """``prod lam^m`` over nonzero eigenvalues with ``Re(lam) < r``."""
    scale = max(1.0, abs(r))
    out = 1.0 + 0j
    for lam, m in spec.items:
        if lam == 0:
            continue
        if abs(lam.real - r) <= 1e-12 * scale:
            raise ROnSpectrum(f"{lam} has real part r = {r}")
        if lam.real < r:
            out *= lam ** m
    return out


def scaled(spec: SpectralData, c: float) -> SpectralData:
    """Spectrum of ``c P`` for ``c > 0``; heat coefficients pick up ``c^alpha``."""
    if not c > 0:
        raise ValidationError("scale must be positive")
    items = tuple((c * lam, m) for lam, m in spec.items)
    tail = spec.tail
    if tail is not None:
        coeffs = tuple(a * c ** al for a, al in zip(tail.heat_coeffs, tail.exponents()))
        tail = TailModel(tail.weyl_dim, coeffs,
                         None if tail.tail_start is None else c * tail.tail_start)
    return SpectralData(items, tail)


# ------------------------------------------------------------------- IO


def _tail_to_json(tail: TailModel) -> dict:
    out = {"weyl_dim": tail.weyl_dim, "heat_coeffs": list(tail.heat_coeffs)}
    if tail.tail_start is not None:
        out["tail_start"] = tail.tail_start
    return out


def tail_from_json(obj) -> TailModel:
    try:
        return TailModel(int(obj["weyl_dim"]), tuple(obj.get("heat_coeffs", ())),
                         obj.get("tail_start"))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad tail object: {exc}") from exc


def dumps_spectral_data(spec: SpectralData) -> str:
    obj = {"items": [[lam.real, lam.imag, m] for lam, m in spec.items]}
    if spec.tail is not None:
        obj["tail"] = _tail_to_json(spec.tail)
    return json.dumps(obj)


def loads_spectral_data(text: str) -> SpectralData:
    try:
        obj = json.loads(text)
        items = tuple((complex(float(re), float(im)), int(m)) for re, im, m in obj["items"])
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"bad spectrum JSON: {exc}") from exc
    tail = tail_from_json(obj["tail"]) if obj.get("tail") is not None else None
    return SpectralData(items, tail)


def read_spectral_data(path) -> SpectralData:
    return loads_spectral_data(Path(path).read_text())

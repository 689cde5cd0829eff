"""Truncated Euler products for Ruelle and Selberg zeta functions.

Also holds the integer bookkeeping that links the Ruelle function to
determinants of flat Laplacians: the exponent table of the determinant
formula, the branching of exterior powers from SO(d) to SO(d-1), and the
Casimir shifts.

Error model
-----------
Both truncated products drop only classes with ``ell > cutoff``. If the
counting function obeys ``N(R) <= C_G exp(g R)`` and traces obey
``|tr chi(x)| <= C exp(c ell(x))``, then summation by parts gives, with
``a = Re(s) + shift``,

    sum_{ell > L} C exp((c - a) ell) <= C C_G (a - c) / (a - c - g) exp(-(a - c - g) L)

which bounds the dropped part of the logarithm.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .core import LengthSpectrum
from .errors import BadWeight, NoGrowthConstants, NotConvergent, ValidationError
from .geodesics import ad_restricted_eigenvalues
from .reps import (
    LocalFactorInput,
    RepresentationSpec,
    SymmetricPowerOfLength,
    class_rep_value,
    euler_factor,
    sigma_value,
    trace_growth_constants,
)

__all__ = [
    "TruncatedValue",
    "ExponentTable",
    "ruelle_zeta",
    "log_euler_sum",
    "selberg_zeta",
    "truncation_error_bound",
    "resolve_trace_growth",
    "complete_homogeneous",
    "det_formula_exponents",
    "branching_sigma_p",
    "restrict_exterior",
    "casimir_shift",
    "casimir_shift_general",
    "sigma_p_highest_weight",
]


@dataclass(frozen=True)
class TruncatedValue:
    """A truncated Euler product and a bound on ``|log(true) - log(value)|``."""

    value: complex
    abs_log_error: float
    cutoff_used: float
    classes_used: int

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "abs_log_error": self.abs_log_error,
            "cutoff_used": self.cutoff_used,
            "classes_used": self.classes_used,
        }


def truncation_error_bound(s, shift, cutoff, growth, trace_growth) -> float:
    """Bound on the log-tail of classes beyond ``cutoff``.

    Parameters
    ----------
    s : complex
    shift : float
    cutoff : float
    growth : (C_G, g)
        ``N(R) <= C_G exp(g R)``.
    trace_growth : (C, c)
        ``|tr chi| <= C exp(c ell)``.

    Raises
    ------
    NotConvergent
        Unless ``Re(s) + shift > c + g``.
    """
    c_gamma, g = growth
    big_c, c = trace_growth
    a = complex(s).real + shift
    kappa = a - c - g
    if not kappa > 0:
        raise NotConvergent(f"Re(s)+shift={a} is not beyond the abscissa {c + g}")
    return big_c * c_gamma * (a - c) / kappa * math.exp(-kappa * cutoff)


def _resolve_growth(spectrum, growth):
    if growth is not None:
        return growth
    return spectrum.growth


def resolve_trace_growth(rep, spectrum, trace_growth):
    if trace_growth is not None:
        return trace_growth
    if rep is None:
        return (1.0, 0.0)
    if isinstance(rep, SymmetricPowerOfLength):
        return rep.growth_constants()
    if isinstance(rep, RepresentationSpec):
        if rep.growth_constants is not None:
            return rep.growth_constants
        return trace_growth_constants(rep, None, spectrum)
    raise NoGrowthConstants("trace growth constants must be given for this representation")


def _error(spectrum, s, shift, growth, tg, factor=1.0):
    if growth is None:
        if not spectrum.classes:
            return 0.0
        raise NoGrowthConstants("spectrum has no growth metadata and none was supplied")
    try:
        return factor * truncation_error_bound(s, shift, spectrum.cutoff, growth, tg)
    except NotConvergent:
        return math.inf


class _LogSum:
    """Exactly rounded accumulation of complex logarithms."""

    def __init__(self):
        self.re: list[float] = []
        self.im: list[float] = []
        self.zero = False

    def add_factor(self, f: complex):
        if f == 0:
            self.zero = True
            return
        z = cmath.log(f)
        self.re.append(z.real)
        self.im.append(z.imag)

    def add_log(self, z: complex):
        self.re.append(z.real)
        self.im.append(z.imag)

    def exp(self) -> complex:
        if self.zero:
            return 0j
        return cmath.exp(complex(math.fsum(self.re), math.fsum(self.im)))


def _primitives(spectrum):
    return [c for c in spectrum.classes if c.is_primitive]


def ruelle_zeta(spectrum: LengthSpectrum, rep=None, sigma: int | None = None, s=1.0,
                shift: float = 0.0, growth=None, trace_growth=None) -> TruncatedValue:
    """Product of ``det(1 - sigma chi(g) exp(-(s + shift) ell))`` over primitive classes.

    ``shift=0`` is the untwisted normalization; the twisted one uses
    ``shift = n = (d - 1) / 2``. If ``Re(s) + shift`` is not beyond the
    abscissa implied by the growth constants the value is still returned,
    with ``abs_log_error = inf``.
    """
    s = complex(s)
    acc = _LogSum()
    prims = _primitives(spectrum)
    for c in prims:
        inp = LocalFactorInput(class_rep_value(rep, c), c.ell, s, sigma_value(sigma, c), shift)
        acc.add_factor(euler_factor(inp))
    growth = _resolve_growth(spectrum, growth)
    tg = resolve_trace_growth(rep, spectrum, trace_growth) if prims else (1.0, 0.0)
    err = _error(spectrum, s, shift, growth, tg)
    return TruncatedValue(acc.exp(), err, spectrum.cutoff, len(prims))


def _power_value(rep, cls, prim):
    """Representation value on ``cls``, computed from the class itself when possible."""
    if isinstance(rep, RepresentationSpec) and cls.word is not None:
        return class_rep_value(rep, cls)
    base = class_rep_value(rep, prim)
    if base.ndim == 2:
        return np.linalg.matrix_power(base, cls.power)
    return base ** cls.power


def log_euler_sum(spectrum: LengthSpectrum, rep=None, sigma: int | None = None, s=1.0,
                  shift: float = 0.0, growth=None, trace_growth=None) -> TruncatedValue:
    """``exp(-sum tr(chi(g)) sigma(g) exp(-(s + shift) ell) / n(g))`` over all classes.

    Agrees with :func:`ruelle_zeta` up to the truncation error when the
    spectrum is closed under powers.
    """
    s = complex(s)
    by_id = spectrum.by_id()
    re, im = [], []
    for c in spectrum.classes:
        prim = by_id.get(c.primitive_id, c)
        a = _power_value(rep, c, prim)
        tr = np.trace(a) if a.ndim == 2 else np.sum(a)
        term = tr * sigma_value(sigma, c) * cmath.exp(-(s + shift) * c.ell) / c.power
        re.append(term.real)
        im.append(term.imag)
    value = cmath.exp(-complex(math.fsum(re), math.fsum(im)))
    growth = _resolve_growth(spectrum, growth)
    tg = resolve_trace_growth(rep, spectrum, trace_growth) if spectrum.classes else (1.0, 0.0)
    err = _error(spectrum, s, shift, growth, tg)
    return TruncatedValue(value, err, spectrum.cutoff, len(spectrum.classes))


# ------------------------------------------------------------------ Selberg


def complete_homogeneous(eigs, k: int) -> np.ndarray:
    """Eigenvalues of ``Sym^k`` for a diagonalizable map with eigenvalues ``eigs``.

    Returns every degree-``k`` monomial, built one variable at a time.
    """
    eigs = np.asarray(eigs, dtype=complex)
    # layers[j] holds all degree-j monomials in the variables seen so far
    layers = [np.ones(1, dtype=complex)] + [np.zeros(0, dtype=complex)] * k
    for u in eigs:
        new = []
        for j in range(k + 1):
            parts = [layers[j - i] * u ** i for i in range(j + 1)]
            new.append(np.concatenate(parts))
        layers = new
    return layers[k]


def _sym_tail(ell: float, k_max: int, r: int) -> float:
    """``sum_{k > k_max} dim Sym^k(C^r) exp(-k ell)``."""
    q = math.exp(-ell)
    total = 0.0
    k = k_max + 1
    while True:
        term = comb(k + r - 1, r - 1) * q ** k
        total += term
        ratio = (k + r) / (k + 1) * q
        if ratio < 0.5 and term < 1e-18 * max(total, 1e-300):
            return total + term * ratio / (1.0 - ratio)
        k += 1


def selberg_zeta(spectrum: LengthSpectrum, rep=None, sigma: int | None = None, s=1.0,
                 k_max: int = 8, growth=None, trace_growth=None) -> TruncatedValue:
    """Twisted Selberg zeta function truncated in length and in symmetric degree.

    The shift is fixed to ``n = (d - 1) / 2``. Degree ``k`` contributes
    ``det(1 - chi(g) sigma(g) Sym^k(Ad) exp(-(s + n) ell))`` where the
    eigenvalues of ``Sym^k(Ad)`` are the degree-``k`` monomials in the
    contracting adjoint eigenvalues.
    """
    s = complex(s)
    d = spectrum.dim
    n = spectrum.n
    acc = _LogSum()
    prims = _primitives(spectrum)
    tg = resolve_trace_growth(rep, spectrum, trace_growth) if prims else (1.0, 0.0)
    k_tail = 0.0
    for c in prims:
        a = class_rep_value(rep, c)
        sv = sigma_value(sigma, c)
        acc.add_factor(euler_factor(LocalFactorInput(a, c.ell, s, sv, float(n))))
        if k_max >= 1:
            chi_eigs = np.linalg.eigvals(a) if a.ndim == 2 else a
            ad = ad_restricted_eigenvalues(c, d)
            scale = sv * cmath.exp(-(s + n) * c.ell)
            for k in range(1, k_max + 1):
                mus = complete_homogeneous(ad, k)
                prod = np.outer(mus, chi_eigs).ravel()
                acc.add_factor(complex(np.prod(1.0 - scale * prod)))
        rate = s.real + n - tg[1]
        if rate <= 0:
            k_tail = math.inf
        elif k_tail < math.inf:
            k_tail += -tg[0] * _sym_tail(c.ell, k_max, d - 1) * math.log1p(
                -math.exp(-rate * c.ell))
    growth = _resolve_growth(spectrum, growth)
    beyond = (1.0 - math.exp(-spectrum.cutoff)) ** (-(d - 1)) if spectrum.cutoff > 0 else math.inf
    err = _error(spectrum, s, float(n), growth, tg, beyond) if prims else 0.0
    return TruncatedValue(acc.exp(), err + k_tail, spectrum.cutoff, len(prims))


# ---------------------------------------------------- exponent bookkeeping


@dataclass(frozen=True)
class ExponentTable:
    """Entries ``(k, p, sign)``: ``det(Delta_k + s(s + 2(n - p)))`` enters with ``sign``."""

    d: int
    entries: tuple[tuple[int, int, int], ...]


def _brute_exponents(d: int) -> Counter:
    """Expand the (p, k)-ordered double product term by term."""
    out: Counter = Counter()
    for p in range(d):
        for k in range(p + 1):
            out[(p - k, p, (-1) ** (p + k))] += 1
    return out


def det_formula_exponents(d: int) -> ExponentTable:
    """Re-indexed exponents of the determinant formula for the Ruelle function."""
    if d < 3 or d % 2 == 0:
        raise ValidationError(f"d must be odd and >= 3, got {d}")
    entries = tuple((k, p, (-1) ** k) for k in range(d) for p in range(k, d))
    if Counter(entries) != _brute_exponents(d):
        raise AssertionError("exponent table disagrees with the direct expansion")
    return ExponentTable(d, entries)


def branching_sigma_p(d: int, p: int) -> list[tuple[int, int]]:
    """Alternating sum of exterior powers of SO(d) restricting to ``sigma_p``.

    Returns ``[(p - k, (-1)^k) for k = 0..p]``.
    """
    if not 0 <= p <= d - 1:
        raise ValidationError(f"p must lie in 0..{d - 1}")
    return [(p - k, (-1) ** k) for k in range(p + 1)]


def restrict_exterior(j: int) -> Counter:
    """Restriction of ``Lambda^j`` of SO(d) to SO(d-1): ``sigma_j + sigma_(j-1)``."""
    out = Counter({j: 1})
    if j >= 1:
        out[j - 1] += 1
    return out


def sigma_p_highest_weight(d: int, p: int) -> tuple[int, ...]:
    """Highest weight of ``sigma_p`` on coordinates ``e_2..e_(n+1)``."""
    n = (d - 1) // 2
    ones = p if p <= n else d - 1 - p
    return tuple([1] * ones + [0] * (n - ones))


def casimir_shift_general(d: int, highest_weight) -> Fraction:
    """``-|rho|^2 - |rho_M|^2 + |nu + rho_M|^2`` with exact arithmetic."""
    n = (d - 1) // 2
    nu = [Fraction(x) for x in highest_weight]
    if len(nu) != n:
        raise BadWeight(f"weight must have length {n} for d={d}, got {len(nu)}")
    rho_m = [Fraction(n + 1 - j) for j in range(2, n + 2)]
    return (-Fraction(n) ** 2 - sum(x * x for x in rho_m)
            + sum((a + b) ** 2 for a, b in zip(nu, rho_m)))


def casimir_shift(d: int, p: int) -> int:
    """Closed form ``-(n - p)^2`` for ``sigma_p``."""
    if not 0 <= p <= d - 1:
        raise ValidationError(f"p must lie in 0..{d - 1}")
    n = (d - 1) // 2
    return -((n - p) ** 2)

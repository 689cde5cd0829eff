"""Representations on group elements, symmetric powers, and local Euler factors."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .core import TOL, GeodesicClass, GroupPresentation, LengthSpectrum, RepresentationSpec
from .errors import IndexOutOfRange, NeedsSpectrum, ValidationError

__all__ = [
    "LocalFactorInput",
    "evaluate_word",
    "symmetric_power_trace",
    "symmetric_power_matrix",
    "symmetric_power_rep",
    "cartan_twist",
    "trace_growth_constants",
    "euler_factor",
    "SymmetricPowerOfLength",
    "class_rep_value",
    "sigma_value",
]


def evaluate_word(rep: RepresentationSpec, word) -> np.ndarray:
    """Product of generator images (negative index = inverse) in word order."""
    n = rep.dim_rep
    out = np.eye(n, dtype=complex)
    imgs, invs = rep.generator_images, None
    for w in word:
        i = abs(int(w))
        if i == 0 or i > len(imgs):
            raise IndexOutOfRange(f"generator index {w} with {len(imgs)} generators")
        if w > 0:
            out = out @ imgs[i - 1]
        else:
            if invs is None:
                invs = rep.inverse_images
            out = out @ invs[i - 1]
    return out


def symmetric_power_trace(lam: complex, m: int) -> complex:
    """Trace of the ``m``-th symmetric power of ``diag(lam, 1/lam)``.

    Uses the closed form ``(lam^(m+1) - lam^-(m+1)) / (lam - 1/lam)`` and
    falls back to the power sum when ``lam`` is close to ``+-1``.
    """
    lam = complex(lam)
    if m < 0:
        raise ValueError("m must be nonnegative")
    gap = lam - 1.0 / lam
    # the closed form loses digits as lam -> +-1
    if abs(gap) < 1e-4:
        return sum(lam ** (m - 2 * j) for j in range(m + 1))
    return (lam ** (m + 1) - lam ** (-(m + 1))) / gap


def symmetric_power_matrix(g, m: int) -> np.ndarray:
    """Action of a 2x2 matrix on degree ``m`` forms in the basis ``x^(m-j) y^j``."""
    g = np.asarray(g, dtype=complex)
    a, c = g[0, 0], g[1, 0]
    b, d = g[0, 1], g[1, 1]
    out = np.zeros((m + 1, m + 1), dtype=complex)
    # image of x is a x + c y; image of y is b x + d y; coefficients indexed by power of y
    pow_x = [np.array([1.0 + 0j])]
    pow_y = [np.array([1.0 + 0j])]
    for _ in range(m):
        pow_x.append(np.convolve(pow_x[-1], [a, c]))
        pow_y.append(np.convolve(pow_y[-1], [b, d]))
    for j in range(m + 1):
        out[:, j] = np.convolve(pow_x[m - j], pow_y[j])
    return out


def symmetric_power_rep(pres: GroupPresentation, m: int) -> RepresentationSpec:
    """The ``(m+1)``-dimensional representation induced by ``Sym^m`` of SL(2, C)."""
    if pres.dim != 3:
        raise ValidationError("symmetric powers need the d = 3 presentation")
    imgs = tuple(symmetric_power_matrix(g, m) for g in pres.generators)
    unitary = all(
        np.linalg.norm(g.conj().T @ g - np.eye(2), 2) <= TOL for g in pres.generators
    )
    if m == 0:
        imgs = tuple(np.eye(1, dtype=complex) for _ in pres.generators)
        unitary = True
    return RepresentationSpec(imgs, unitary_flag=unitary and m <= 1, source=("sym", m, pres))


def _theta(g: np.ndarray) -> np.ndarray:
    return np.linalg.inv(np.asarray(g, dtype=complex).conj().T)


def cartan_twist(rep: RepresentationSpec) -> RepresentationSpec:
    """Compose with the Cartan involution ``g -> (g^*)^-1``.

    For symmetric-power representations the involution is applied to the
    SL(2, C) generators and the power is rebuilt, so the result is again
    ``Sym^m`` of a presentation.
    """
    if rep.source is not None and rep.source[0] == "sym":
        _, m, pres = rep.source
        twisted = GroupPresentation(tuple(_theta(g) for g in pres.generators), pres.relators)
        return symmetric_power_rep(twisted, m)
    imgs = tuple(_theta(a) for a in rep.generator_images)
    return RepresentationSpec(imgs, rep.unitary_flag, rep.growth_constants)


def _op_norm_log(a: np.ndarray) -> float:
    return math.log(np.linalg.norm(a, 2))


def trace_growth_constants(
    rep: RepresentationSpec | None,
    pres: GroupPresentation | None = None,
    spectrum: LengthSpectrum | None = None,
) -> tuple[float, float]:
    """Constants ``(C, c)`` with ``|tr chi(g)| <= C exp(c ell(g))``.

    ``C`` is the dimension. ``c`` is the largest log operator norm of a
    generator or inverse divided by the shortest primitive length, which
    is valid when every letter of a word costs at least that length. The
    bound is then enlarged if needed so that it holds for every class of
    ``spectrum`` that carries a word; beyond those classes it is a
    heuristic.
    """
    if rep is None:
        return (1.0, 0.0)
    if pres is not None and len(rep.generator_images) != pres.rank:
        raise ValidationError("representation is not aligned with the presentation")
    big_c = float(rep.dim_rep)
    if rep.unitary_flag:
        return (big_c, 0.0)
    logs = [_op_norm_log(a) for a in rep.generator_images]
    logs += [_op_norm_log(a) for a in rep.inverse_images]
    top = max(logs, default=0.0)
    if top <= 1e-14:
        return (big_c, 0.0)
    if spectrum is None or not spectrum.primitives():
        raise NeedsSpectrum("shortest primitive length unknown; pass a spectrum")
    ell_min = min(c.ell for c in spectrum.primitives())
    small_c = top / ell_min
    for cls in spectrum.classes:
        if cls.word is None:
            continue
        tr = abs(np.trace(evaluate_word(rep, cls.word)))
        if tr > 0:
            small_c = max(small_c, (math.log(tr) - math.log(big_c)) / cls.ell)
    return (big_c, small_c)


@dataclass(frozen=True)
class LocalFactorInput:
    """Arguments of one Euler factor ``det(1 - sigma chi(g) exp(-(s + shift) ell))``.

    ``rep_value`` is either a square matrix or a 1-d array of eigenvalues.
    """

    rep_value: np.ndarray
    ell: float
    s: complex
    sigma_value: complex = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if abs(abs(self.sigma_value) - 1.0) > TOL:
            raise ValidationError(f"sigma value {self.sigma_value} is not of modulus 1")


def _factor(rep_value, scale: complex) -> complex:
    """``det(1 - scale * A)`` for a matrix, or the product over eigenvalues."""
    a = np.asarray(rep_value, dtype=complex)
    if a.ndim == 2:
        return complex(np.linalg.det(np.eye(a.shape[0]) - scale * a))
    return complex(np.prod(1.0 - scale * a))


def euler_factor(inp: LocalFactorInput) -> complex:
    """One factor of the Ruelle product; may vanish outside the convergence region."""
    scale = inp.sigma_value * cmath.exp(-(inp.s + inp.shift) * inp.ell)
    return _factor(inp.rep_value, scale)


# ------------------------------------------------- representation adaptors


@dataclass(frozen=True)
class SymmetricPowerOfLength:
    """``Sym^m`` evaluated from the complex length alone.

    The large eigenvalue is taken as ``exp((ell + i theta) / 2)``. The
    SL(2, C) sign of the eigenvalue is lost in the complex length, so for
    odd ``m`` this is only determined up to an overall sign of the
    eigenvalues; use a presentation and words when that matters.
    """

    m: int

    @property
    def dim_rep(self) -> int:
        return self.m + 1

    def eigenvalues(self, cls: GeodesicClass) -> np.ndarray:
        lam = cmath.exp(complex(cls.ell, cls.theta) / 2.0)
        return np.array([lam ** (self.m - 2 * j) for j in range(self.m + 1)])

    def growth_constants(self) -> tuple[float, float]:
        return (float(self.m + 1), self.m / 2.0)


def class_rep_value(rep, cls: GeodesicClass) -> np.ndarray:
    """Matrix or eigenvalue array of ``rep`` on the class ``cls``.

    ``rep`` may be ``None`` (trivial), a :class:`RepresentationSpec`
    (needs ``cls.word``), a :class:`SymmetricPowerOfLength`, or a mapping
    from class id to matrix.
    """
    if rep is None:
        return np.ones(1, dtype=complex)
    if isinstance(rep, RepresentationSpec):
        if cls.word is None:
            raise ValidationError(
                f"{cls.class_id} has no word; a generator representation cannot be evaluated"
            )
        return evaluate_word(rep, cls.word)
    if isinstance(rep, SymmetricPowerOfLength):
        return rep.eigenvalues(cls)
    return np.asarray(rep[cls.class_id], dtype=complex)


def sigma_value(sigma: int | None, cls: GeodesicClass) -> complex:
    """Character ``exp(i l theta)`` of SO(2) on the holonomy of ``cls``."""
    if sigma is None or sigma == 0:
        return 1.0 + 0j
    return cmath.exp(1j * sigma * cls.theta)


def dim_sym(k: int, r: int) -> int:
    """Dimension of ``Sym^k`` of an ``r``-dimensional space."""
    return comb(k + r - 1, r - 1) if r > 0 else int(k == 0)

"""Torsion of based cochain complexes and flat Laplacians built from a star.

Conventions
-----------
Matrices act on column coordinates in the preferred bases, so
``deltas[q]`` has shape ``(r_{q+1}, r_q)``. A basis is a matrix whose
columns are the basis vectors.

``reidemeister_torsion`` uses

    tau = prod_q [b_q, h_q, b~_{q+1} / c_q]^{(-1)^q},

under which ``0 -> C -> C -> 0`` with ``delta = 2`` has torsion ``1/2``.
The ``"ray-singer"`` convention returns the reciprocal; it is the one for
which an acyclic complex with a special-unitary star satisfies
``T = tau^2`` exactly.

The flat codifferential is

    d*_q = (-1)^{dq + d + 1} star_{d-q+1} delta_{d-q} star_q : C^q -> C^{q-1}

and the flat Laplacian is ``d*_{q+1} delta_q + delta_{q-1} d*_q``. When
``star_{d-q} star_q = (-1)^{q(d-q)}`` one checks directly that
``star_p Delta_p = Delta_{d-p} star_p``, so degrees ``p`` and ``d - p`` are
isospectral.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

from .errors import (
    BadLength,
    DimensionMismatch,
    DualityViolated,
    FormatError,
    IllConditioned,
    InconsistentBases,
    NotAcyclicWithoutBases,
    NotClosed,
    Singular,
    ValidationError,
)
from .regdet import SpectralData, agmon_angle, prime_det_product, reg_det_finite

__all__ = [
    "CochainComplex",
    "StarStructure",
    "ZeroModeData",
    "TorsionValue",
    "FriedReport",
    "base_change_det",
    "numerical_rank",
    "reidemeister_torsion",
    "rebase",
    "flat_codifferential",
    "flat_laplacian",
    "zero_modes",
    "duality_check",
    "t0_torsion",
    "cappell_miller_torsion",
    "order_h",
    "fried_constant",
    "fried_limit_check",
    "richardson_limit",
    "single_degree_limit",
    "dumps_complex",
    "loads_complex",
    "read_complex",
]

RANK_RTOL = 1e-9
ZERO_RTOL = 1e-4
CLUSTER_RTOL = 1e-9


def _as_matrix(a, shape=None) -> np.ndarray:
    a = np.array(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    if shape is not None and a.shape != shape:
        raise DimensionMismatch(f"expected shape {shape}, got {a.shape}")
    return a


def _scale(*mats) -> float:
    return max([1.0] + [float(np.abs(m).max()) for m in mats if m.size])


@dataclass(frozen=True)
class CochainComplex:
    """``0 -> C^0 -> ... -> C^d -> 0`` in preferred bases."""

    dims: tuple[int, ...]
    deltas: tuple[np.ndarray, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        dims = tuple(int(r) for r in self.dims)
        if any(r < 0 for r in dims) or not dims:
            raise ValidationError("ranks must be nonnegative")
        if len(self.deltas) != len(dims) - 1:
            raise DimensionMismatch(f"{len(dims)} degrees need {len(dims) - 1} differentials")
        deltas = tuple(_as_matrix(m, (dims[q + 1], dims[q])) for q, m in enumerate(self.deltas))
        for q in range(len(deltas) - 1):
            prod = deltas[q + 1] @ deltas[q]
            if prod.size and np.abs(prod).max() > 1e-12 * _scale(deltas[q], deltas[q + 1]) ** 2:
                raise ValidationError(f"delta_{q + 1} delta_{q} is not zero")
        for m in deltas:
            m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "deltas", deltas)

    @property
    def d(self) -> int:
        return len(self.dims) - 1

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** q * r for q, r in enumerate(self.dims))

    def delta(self, q: int) -> np.ndarray:
        """``delta_q``, with zero maps outside ``0..d-1``."""
        if 0 <= q < self.d:
            return self.deltas[q]
        rows = self.dims[q + 1] if 0 <= q + 1 <= self.d else 0
        cols = self.dims[q] if 0 <= q <= self.d else 0
        return np.zeros((rows, cols), dtype=complex)

    def betti(self) -> list[int]:
        ranks = [numerical_rank(self.delta(q)) for q in range(-1, self.d + 1)]
        return [self.dims[q] - ranks[q + 1] - ranks[q] for q in range(self.d + 1)]

    def is_acyclic(self) -> bool:
        return all(b == 0 for b in self.betti())


@dataclass(frozen=True)
class StarStructure:
    """Invertible maps ``star_q : C^q -> C^{d-q}`` with ``star star = (-1)^{q(d-q)}``."""

    stars: tuple[np.ndarray, ...]
    check: bool = True

    def __post_init__(self):
        stars = tuple(_as_matrix(s) for s in self.stars)
        d = len(stars) - 1
        for q, s in enumerate(stars):
            if s.shape[0] != stars[d - q].shape[1] or s.shape[0] != s.shape[1]:
                raise DimensionMismatch(f"star_{q} has shape {s.shape}")
        if self.check:
            for q in range(d + 1):
                prod = stars[d - q] @ stars[q]
                target = (-1) ** (q * (d - q)) * np.eye(prod.shape[0])
                if prod.size and np.abs(prod - target).max() > 1e-10 * _scale(prod):
                    raise ValidationError(f"star_{d - q} star_{q} is not {(-1) ** (q * (d - q))}")
        object.__setattr__(self, "stars", stars)

    @property
    def d(self) -> int:
        return len(self.stars) - 1

    def validate_against(self, cx: CochainComplex):
        if self.d != cx.d:
            raise DimensionMismatch(f"star has d={self.d}, complex has d={cx.d}")
        for q, s in enumerate(self.stars):
            if s.shape != (cx.dims[cx.d - q], cx.dims[q]):
                raise DimensionMismatch(f"star_{q} shape {s.shape} does not fit ranks {cx.dims}")


@dataclass(frozen=True)
class TorsionValue:
    """Coefficient of a torsion element against named reference bases."""

    coeff: complex
    sign_ambiguous: bool = True
    reference_bases: tuple[str, ...] = ()

    def __post_init__(self):
        if self.coeff == 0 or not np.isfinite(self.coeff):
            raise ValidationError(f"torsion coefficient must be finite and nonzero, got {self.coeff}")
        object.__setattr__(self, "coeff", complex(self.coeff))


# ------------------------------------------------------------ linear algebra


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Rank with singular values below ``rtol * max(1, sigma_max)`` treated as zero."""
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(sv > rtol * max(1.0, sv[0])))


def base_change_det(v, w) -> complex:
    """``det T`` where ``w_i = sum_j T_ij v_j`` (columns of ``v`` and ``w`` are the bases).

    Raises
    ------
    Singular
        If either set of vectors is not a basis.
    """
    v = _as_matrix(v)
    w = _as_matrix(w)
    if v.shape != w.shape or v.shape[0] != v.shape[1]:
        raise DimensionMismatch(f"bases of shapes {v.shape} and {w.shape}")
    if v.shape[0] == 0:
        return 1.0 + 0j
    for name, m in (("v", v), ("w", w)):
        if numerical_rank(m, 1e-12) < m.shape[0]:
            raise Singular(f"{name} is not a basis")
    return complex(np.linalg.det(np.linalg.solve(v, w)))


def _boundary_basis(delta: np.ndarray, rng=None):
    """Basis ``b = delta L`` of the image and the lift ``L``.

    Without ``rng`` the lift is the set of standard basis vectors at the
    pivot columns of a column-pivoted QR; with ``rng`` it is random.
    """
    rank = numerical_rank(delta)
    if rng is None:
        if rank == 0:
            lift = np.zeros((delta.shape[1], 0), dtype=complex)
        else:
            _, _, piv = sla.qr(delta, pivoting=True, mode="economic")
            lift = np.zeros((delta.shape[1], rank), dtype=complex)
            lift[piv[:rank], np.arange(rank)] = 1.0
    else:
        lift = rng.standard_normal((delta.shape[1], rank)) + 1j * rng.standard_normal(
            (delta.shape[1], rank))
    return delta @ lift, lift


def reidemeister_torsion(cx: CochainComplex, cohom_bases: Sequence | None = None,
                         convention: str = "milnor", rng=None) -> TorsionValue:
    """Torsion of a based complex.

    Parameters
    ----------
    cx : CochainComplex
    cohom_bases : list of matrices, optional
        Cycle representatives ``h_q`` (columns) of a basis of ``H^q``.
        Required unless the complex is acyclic.
    convention : {"milnor", "ray-singer"}
    rng : numpy Generator, optional
        Draw the boundary bases at random instead of by pivoting; the
        result must not change.
    """
    if convention not in ("milnor", "ray-singer"):
        raise ValidationError(f"unknown convention {convention!r}")
    d = cx.d
    betti = cx.betti()
    if cohom_bases is None:
        if any(betti):
            raise NotAcyclicWithoutBases(f"Betti numbers {betti}")
        cohom_bases = [np.zeros((r, 0), dtype=complex) for r in cx.dims]
    if len(cohom_bases) != d + 1:
        raise BadLength(f"need {d + 1} cohomology bases")
    hs = []
    for q, h in enumerate(cohom_bases):
        h = _as_matrix(h) if np.size(h) else np.zeros((cx.dims[q], 0), dtype=complex)
        if h.shape != (cx.dims[q], betti[q]):
            raise InconsistentBases(f"H^{q} has dimension {betti[q]}, got {h.shape[1]} vectors")
        cyc = cx.delta(q) @ h
        if cyc.size and np.abs(cyc).max() > 1e-9 * _scale(cx.delta(q)) * _scale(h):
            raise InconsistentBases(f"representatives in degree {q} are not cycles")
        hs.append(h)

    bs, lifts = {}, {}
    for q in range(1, d + 1):
        bs[q], lifts[q] = _boundary_basis(cx.delta(q - 1), rng)
    log_abs, phase = 0.0, 1.0 + 0j
    names = []
    for q in range(d + 1):
        cols = [bs.get(q, np.zeros((cx.dims[q], 0))), hs[q],
                lifts.get(q + 1, np.zeros((cx.dims[q], 0)))]
        m = np.hstack(cols)
        if m.shape[1] != cx.dims[q]:
            raise InconsistentBases(f"degree {q}: {m.shape[1]} vectors for rank {cx.dims[q]}")
        if m.shape[0] == 0:
            continue
        sign, logdet = np.linalg.slogdet(m)
        if not np.isfinite(logdet) or numerical_rank(m, 1e-12) < m.shape[0]:
            raise InconsistentBases(f"degree {q}: chosen vectors are not a basis")
        e = (-1) ** q
        log_abs += e * logdet
        phase *= sign if e > 0 else np.conj(sign)
        if betti[q]:
            names.append(f"H^{q}")
    coeff = phase * math.exp(log_abs)
    if convention == "ray-singer":
        coeff = 1.0 / coeff
    return TorsionValue(coeff, True, tuple(names))


def rebase(cx: CochainComplex, transforms: Sequence) -> CochainComplex:
    """Same complex in new coordinates ``x' = T_q x``: ``delta'_q = T_{q+1} delta_q T_q^{-1}``.

    The torsion picks up ``prod_q det(T_q)^{(-1)^q}``.
    """
    ts = [_as_matrix(t, (r, r)) for t, r in zip(transforms, cx.dims)]
    if len(ts) != cx.d + 1:
        raise BadLength("need one transform per degree")
    deltas = [ts[q + 1] @ cx.deltas[q] @ np.linalg.inv(ts[q]) for q in range(cx.d)]
    return CochainComplex(cx.dims, tuple(deltas), cx.labels)


# ------------------------------------------------------------ flat Laplacian


def flat_codifferential(cx: CochainComplex, star: StarStructure) -> list[np.ndarray]:
    """``[d*_0, ..., d*_d]`` with ``d*_q : C^q -> C^{q-1}`` (``d*_0`` is empty)."""
    star.validate_against(cx)
    d = cx.d
    s = star.stars
    out = [np.zeros((0, cx.dims[0]), dtype=complex)]
    for q in range(1, d + 1):
        sign = (-1) ** (d * q + d + 1)
        out.append(sign * (s[d - q + 1] @ cx.deltas[d - q] @ s[q]))
    return out


def flat_laplacian(cx: CochainComplex, star: StarStructure) -> list[np.ndarray]:
    """``Delta_q = d*_{q+1} delta_q + delta_{q-1} d*_q`` for ``q = 0..d``."""
    cod = flat_codifferential(cx, star)
    d = cx.d
    laps = []
    for q in range(d + 1):
        m = np.zeros((cx.dims[q], cx.dims[q]), dtype=complex)
        if q < d:
            m += cod[q + 1] @ cx.deltas[q]
        if q > 0:
            m += cx.deltas[q - 1] @ cod[q]
        laps.append(m)
    return laps


@dataclass(frozen=True)
class ZeroModeData:
    """Generalized zero eigenspaces of the Laplacians and the rest of their spectra.

    ``bases[k]`` has orthonormal columns spanning ``V_0^k``. The restricted
    maps are expressed in those bases and are ``None`` when no complex was
    supplied.
    """

    h: tuple[int, ...]
    bases: tuple[np.ndarray, ...]
    spectra: tuple[SpectralData, ...]
    restricted_d: tuple[np.ndarray, ...] | None = None
    restricted_codiff: tuple[np.ndarray, ...] | None = None
    ill_conditioned: tuple[bool, ...] = ()
    margins: tuple[float, ...] = field(default=(), compare=False)

    @property
    def d(self) -> int:
        return len(self.h) - 1


def _cluster(eigs: np.ndarray, scale: float) -> tuple[tuple[complex, int], ...]:
    """Merge numerically equal eigenvalues into (mean, multiplicity) items."""
    order = np.lexsort((eigs.imag, eigs.real))
    groups: list[list[complex]] = []
    for lam in eigs[order]:
        for g in groups:
            if abs(g[0] - lam) <= CLUSTER_RTOL * scale:
                g.append(lam)
                break
        else:
            groups.append([lam])
    return tuple((complex(np.mean(g)), len(g)) for g in groups)


def _zero_space(lap: np.ndarray, zero_rtol: float):
    n = lap.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0, dtype=complex), math.inf, 1.0
    scale = _scale(lap)
    thr = zero_rtol * scale
    t, z, sdim = sla.schur(lap, output="complex", sort=lambda x: abs(x) <= thr)
    eigs = np.diag(t)
    large = np.abs(eigs[sdim:])
    # a perturbed Jordan block spreads its zeros on a ring but keeps their mean
    # tiny; the margin is the gap, in decades, to the nearest nonzero eigenvalue
    # and to the mean of the zero cluster
    hi = math.log10(large.min() / thr) if large.size else math.inf
    if sdim:
        mean = abs(np.mean(eigs[:sdim]))
        lo = math.log10(thr / mean) - 4.0 if mean > 0 else math.inf
    else:
        lo = math.inf
    return z[:, :sdim], eigs[sdim:], min(lo, hi), scale


def zero_modes(laplacians: Sequence, cx: CochainComplex | None = None,
               star: StarStructure | None = None, zero_rtol: float = ZERO_RTOL) -> ZeroModeData:
    """Split each Laplacian into its generalized zero eigenspace and the rest.

    The split comes from a sorted complex Schur form: eigenvalues with
    ``|lam| <= zero_rtol * scale`` are treated as zero. The threshold is
    loose on purpose, because a nilpotent Jordan block of size ``m`` is
    perturbed to eigenvalues of size ``eps^(1/m)``. Each space is checked
    to be annihilated by ``Delta^h``. An :class:`IllConditioned` warning is
    raised when a nonzero eigenvalue lies within one decade of the
    threshold, or when the zero cluster has a mean above
    ``1e-4 * zero_rtol * scale``.

    With ``cx`` and ``star`` the differential and codifferential are also
    restricted to the zero eigenspaces.
    """
    bases, spectra, flags, margins, hs = [], [], [], [], []
    for k, lap in enumerate(laplacians):
        lap = _as_matrix(lap)
        v, rest, margin, scale = _zero_space(lap, zero_rtol)
        h = v.shape[1]
        if h:
            resid = np.linalg.matrix_power(lap, h) @ v
            if np.abs(resid).max() > 1e-8 * scale ** h:
                warnings.warn(f"degree {k}: Delta^h does not annihilate V_0 "
                              f"(residual {np.abs(resid).max():.2e})", IllConditioned,
                              stacklevel=2)
        flag = margin < 1.0
        if flag:
            warnings.warn(f"degree {k}: zero-mode decision margin is {margin:.2f} decades",
                          IllConditioned, stacklevel=2)
        hs.append(h)
        bases.append(v)
        spectra.append(SpectralData(_cluster(rest, scale)))
        flags.append(flag)
        margins.append(margin)

    rd = rc = None
    if cx is not None and star is not None:
        cod = flat_codifferential(cx, star)
        rd, rc = [], []
        for q in range(cx.d):
            rd.append(_restrict(cx.deltas[q], bases[q], bases[q + 1], f"delta_{q}"))
        for q in range(1, cx.d + 1):
            rc.append(_restrict(cod[q], bases[q], bases[q - 1], f"d*_{q}"))
        rd, rc = tuple(rd), tuple(rc)
    return ZeroModeData(tuple(hs), tuple(bases), tuple(spectra), rd, rc, tuple(flags),
                        tuple(margins))


def _restrict(a, v_src, v_dst, name):
    image = a @ v_src
    m = v_dst.conj().T @ image
    if image.size and np.abs(image - v_dst @ m).max() > 1e-7 * _scale(a):
        raise NotClosed(f"{name} does not map V_0 into V_0")
    return m


def _multiset_distance(a: SpectralData, b: SpectralData) -> float:
    xa = np.repeat(a.eigenvalues, a.multiplicities)
    xb = np.repeat(b.eigenvalues, b.multiplicities)
    if xa.size != xb.size:
        return math.inf
    if xa.size == 0:
        return 0.0
    cost = np.abs(xa[:, None] - xb[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def duality_check(zero: ZeroModeData, d: int, tol: float = 1e-8) -> bool:
    """``h_p == h_{d-p}`` and equal nonzero spectra (within ``tol`` relative) for all ``p``."""
    if len(zero.h) != d + 1:
        raise BadLength(f"expected {d + 1} degrees, got {len(zero.h)}")
    for p in range(d + 1):
        if zero.h[p] != zero.h[d - p]:
            return False
        a, b = zero.spectra[p], zero.spectra[d - p]
        scale = max([1.0] + [abs(x) for x in a.eigenvalues] + [abs(x) for x in b.eigenvalues])
        if _multiset_distance(a, b) > tol * scale:
            return False
    return True


# ----------------------------------------------------------------- torsions


def t0_torsion(zero: ZeroModeData, reference_bases: Sequence | None = None) -> TorsionValue:
    """Torsion of the zero-mode complex ``(V_0, d, d*)``.

    Handled cases:

    * ``V_0 = 0``: the value is 1.
    * ``V_0`` in a single degree ``k``: ``[V_0 / reference]^{(-1)^k}``, which
      is 1 when the reference is the computed basis (the default).
    * ``(V_0, d)`` acyclic: the square of its Ray-Singer-convention
      Reidemeister torsion, with the reference bases as preferred bases
      (default: the computed orthonormal bases, so the value is then only
      defined up to a phase).

    The general case is not implemented.
    """
    if zero.restricted_d is None and sum(1 for h in zero.h if h) > 1:
        raise NotClosed("restricted maps are needed; pass the complex to zero_modes")
    if not any(zero.h):
        return TorsionValue(1.0, False, ())
    degrees = [k for k, h in enumerate(zero.h) if h]
    if len(degrees) == 1:
        k = degrees[0]
        ref = zero.bases[k] if reference_bases is None else _as_matrix(reference_bases[k])
        coeff = base_change_det(zero.bases[k].conj().T @ ref, np.eye(zero.h[k])) ** ((-1) ** k)
        return TorsionValue(coeff, False, (f"V0^{k}",))
    deltas = list(zero.restricted_d)
    if reference_bases is not None:
        # coordinates against the reference basis: x_ref = (V^* R)^{-1} x_V
        ts = [np.linalg.solve(zero.bases[q].conj().T @ _as_matrix(reference_bases[q]),
                              np.eye(zero.h[q])) if zero.h[q] else np.zeros((0, 0))
              for q in range(zero.d + 1)]
        deltas = [ts[q + 1] @ deltas[q] @ np.linalg.inv(ts[q]) if deltas[q].size else deltas[q]
                  for q in range(zero.d)]
    sub = CochainComplex(zero.h, tuple(deltas))
    if not sub.is_acyclic():
        raise NotImplementedError("T0 for a zero-mode complex with cohomology is not implemented")
    tau = reidemeister_torsion(sub, convention="ray-singer")
    names = tuple(f"V0^{k}" for k in degrees)
    return TorsionValue(tau.coeff ** 2, False, names)


def cappell_miller_torsion(cx: CochainComplex, star: StarStructure, r: float | None = None,
                           theta: float | None = None, t0: TorsionValue | None = None,
                           zero: ZeroModeData | None = None) -> TorsionValue:
    """Cappell-Miller torsion of a starred finite complex.

    With ``r`` the determinant in each degree is split at ``Re(lam) = r``:
    the part with ``Re(lam) >= r`` is regularized and the finitely many
    nonzero eigenvalues below ``r`` are multiplied in directly. Without
    ``r`` the whole nonzero spectrum is regularized with the Agmon angle
    ``theta`` (chosen automatically if omitted). Both forms agree.
    """
    if zero is None:
        zero = zero_modes(flat_laplacian(cx, star), cx, star)
    if t0 is None:
        t0 = t0_torsion(zero)
    log_terms = []
    for p in range(1, cx.d + 1):
        spec = zero.spectra[p]
        e = (-1) ** (p + 1) * p
        if r is not None:
            above = spec.restrict_real(r, below=False)
            det = prime_det_product(spec, r)
            if above.items:
                det *= reg_det_finite(above, agmon_angle(above).theta)
        else:
            th = theta if theta is not None else agmon_angle(spec).theta
            det = reg_det_finite(spec, th)
        log_terms.append(e * np.log(complex(det)))
    value = np.exp(sum(log_terms)) * t0.coeff
    return TorsionValue(value, False, t0.reference_bases)


# --------------------------------------------------- order and constant


def order_h(d: int, h: Sequence[int]) -> int:
    """``sum_{k=0}^{n} (d + 1 - 2k)(-1)^k h_k`` with ``d = 2n + 1``."""
    if d < 1 or d % 2 == 0:
        raise ValidationError("d must be odd")
    n = (d - 1) // 2
    if len(h) != n + 1:
        raise BadLength(f"expected {n + 1} entries, got {len(h)}")
    return sum((d + 1 - 2 * k) * (-1) ** k * int(h[k]) for k in range(n + 1))


def fried_constant(d: int, h: Sequence[int]) -> Fraction:
    """``prod_k prod_{p >= k, p != n} (2(n - p))^{(-1)^k h_k}``, exactly."""
    if d < 1 or d % 2 == 0:
        raise ValidationError("d must be odd")
    if len(h) != d:
        raise BadLength(f"expected {d} entries, got {len(h)}")
    n = (d - 1) // 2
    for k in range(1, d):
        if h[k] != h[d - k]:
            warnings.warn(f"h_{k} != h_{d - k}; the vector is not duality-symmetric",
                          UserWarning, stacklevel=2)
            break
    out = Fraction(1)
    for k in range(d):
        for p in range(k, d):
            if p != n:
                out *= Fraction(2 * (n - p)) ** ((-1) ** k * int(h[k]))
    return out


def richardson_limit(s_values, f_values) -> complex:
    """Value at ``s = 0`` of the interpolating polynomial (Neville's scheme)."""
    s = np.asarray(s_values, dtype=complex)
    p = np.asarray(f_values, dtype=complex).copy()
    m = len(s)
    for j in range(1, m):
        for i in range(m - j):
            p[i] = (s[i + j] * p[i] - s[i] * p[i + 1]) / (s[i + j] - s[i])
    return complex(p[0])


def _shifted_det(spec: SpectralData, c: complex) -> complex:
    return complex(np.prod((spec.eigenvalues + c) ** spec.multiplicities))


def _zero_count(spec: SpectralData) -> int:
    return int(sum(m for lam, m in spec.items if lam == 0))


def _nonzero(spec: SpectralData) -> SpectralData:
    return SpectralData(tuple((lam, m) for lam, m in spec.items if lam != 0))


@dataclass(frozen=True)
class FriedReport:
    h_per_degree: tuple[int, ...]
    order: int
    constant: Fraction
    s_samples: tuple[complex, ...]
    lhs_samples: tuple[complex, ...]
    extrapolated: complex
    rhs: complex
    rel_deviation: float
    lhs_at_zero: complex | None = None

    def to_json(self) -> dict:
        def c(z):
            return [z.real, z.imag]
        return {
            "h": list(self.h_per_degree),
            "order": self.order,
            "constant": str(self.constant),
            "s_samples": [c(z) for z in self.s_samples],
            "lhs_samples": [c(z) for z in self.lhs_samples],
            "extrapolated": c(self.extrapolated),
            "rhs": c(self.rhs),
            "rel_deviation": self.rel_deviation,
            "lhs_at_zero": None if self.lhs_at_zero is None else c(self.lhs_at_zero),
        }


def _default_samples(s0: float = 1e-2, m: int = 8) -> list[float]:
    return [s0 * 2.0 ** (-j) for j in range(m)]


def fried_limit_check(spectra: Sequence[SpectralData], d: int,
                      s_samples: Sequence[complex] | None = None,
                      tol: float = 1e-8) -> FriedReport:
    """Compare ``s^-h R(s)`` in determinant form with its predicted limit.

    Parameters
    ----------
    spectra : list of SpectralData, length d + 1
        Per-degree spectra; zero modes appear as items equal to ``0``.
    d : int
        Odd dimension.
    s_samples : list of complex, optional
        Points at which the left side is evaluated before extrapolation.

    Raises
    ------
    DualityViolated
        If degrees ``p`` and ``d - p`` differ.
    """
    if len(spectra) != d + 1:
        raise BadLength(f"expected {d + 1} spectra")
    n = (d - 1) // 2
    hs = [_zero_count(sp) for sp in spectra]
    for p in range(d + 1):
        a, b = spectra[p], spectra[d - p]
        scale = max([1.0] + [abs(x) for x in a.eigenvalues] + [abs(x) for x in b.eigenvalues])
        if _multiset_distance(a, b) > tol * scale:
            raise DualityViolated(f"degrees {p} and {d - p} have different spectra")
    order = order_h(d, hs[: n + 1])
    const = fried_constant(d, hs[:d])

    def lhs(s: complex) -> complex:
        log_total = 0j
        for k in range(d):
            for p in range(k, d):
                det = _shifted_det(spectra[k], s * (s + 2 * (n - p)))
                log_total += (-1) ** k * np.log(det)
        return complex(np.exp(log_total - order * np.log(s)))

    rhs_log = 0j
    for k in range(1, d + 1):
        rhs_log += (-1) ** (k + 1) * k * np.log(complex(reg_det_finite(_nonzero(spectra[k]))))
    rhs = complex(const) * complex(np.exp(rhs_log))

    samples = list(s_samples) if s_samples is not None else _default_samples()
    values = [lhs(complex(s)) for s in samples]
    limit = richardson_limit(samples, values)
    at_zero = None
    if not any(hs):
        at_zero = complex(np.exp(sum((-1) ** k * np.log(_shifted_det(spectra[k], 0.0))
                                     for k in range(d) for p in range(k, d))))
    dev = abs(limit / rhs - 1.0)
    return FriedReport(tuple(hs), order, const, tuple(complex(s) for s in samples),
                       tuple(values), limit, rhs, float(dev), at_zero)


def single_degree_limit(lap, a: float, h: int | None = None,
                        s_samples: Sequence[complex] | None = None):
    """Extrapolated ``lim s^-e det(Delta + s(s + 2a))`` and its predicted value.

    ``e = h`` for ``a != 0`` and ``e = 2h`` for ``a = 0``; the prediction
    is ``(2a)^h det'(Delta)`` and ``det'(Delta)`` respectively.

    The left side is a polynomial in ``s`` of degree at most ``2 dim - e``,
    so by default it is sampled at that many roots of unity of radius 1/2
    and interpolated to ``s = 0``. Tiny samples would be swamped by the
    ill-conditioning of ``det`` near a Jordan block.
    """
    lap = _as_matrix(lap)
    zm = zero_modes([lap])
    if h is None:
        h = zm.h[0]
    e = h if a != 0 else 2 * h
    if s_samples is None:
        m = 2 * lap.shape[0] - e + 3
        s_samples = 0.5 * np.exp(2j * np.pi * (np.arange(m) + 0.5) / m)
    samples = list(s_samples)
    eye = np.eye(lap.shape[0])
    values = [np.linalg.det(lap + s * (s + 2 * a) * eye) / s ** e for s in samples]
    limit = richardson_limit(samples, values)
    det_prime = reg_det_finite(zm.spectra[0]) if zm.spectra[0].items else 1.0
    expected = (2 * a) ** h * det_prime if a != 0 else det_prime
    return complex(limit), complex(expected)


# --------------------------------------------------------------------- IO


def _mat_to_json(m: np.ndarray):
    return [[[z.real, z.imag] for z in row] for row in np.asarray(m, dtype=complex)]


def _mat_from_json(obj, shape=None) -> np.ndarray:
    rows = []
    for row in obj:
        rows.append([complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z)
                     for z in row])
    if not rows and shape is not None:
        return np.zeros(shape, dtype=complex)
    m = np.array(rows, dtype=complex)
    if shape is not None:
        m = m.reshape(shape)
    return m


def dumps_complex(cx: CochainComplex, star: StarStructure | None = None) -> str:
    obj = {"format": "complex.v1", "dims": list(cx.dims),
           "deltas": [_mat_to_json(m) for m in cx.deltas]}
    if star is not None:
        obj["star"] = [_mat_to_json(s) for s in star.stars]
    return json.dumps(obj)


def loads_complex(text: str) -> tuple[CochainComplex, StarStructure | None]:
    try:
        obj = json.loads(text)
        if obj.get("format") != "complex.v1":
            raise FormatError(f"unknown format {obj.get('format')!r}")
        dims = [int(r) for r in obj["dims"]]
        deltas = [_mat_from_json(m, (dims[q + 1], dims[q])) for q, m in enumerate(obj["deltas"])]
        d = len(dims) - 1
        star = None
        if obj.get("star") is not None:
            star = StarStructure(tuple(_mat_from_json(s, (dims[d - q], dims[q]))
                                       for q, s in enumerate(obj["star"])))
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise FormatError(f"bad complex file: {exc}") from exc
    return CochainComplex(tuple(dims), tuple(deltas)), star


def read_complex(path):
    return loads_complex(Path(path).read_text())

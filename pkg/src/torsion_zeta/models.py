"""Random and hand-built finite models used by the verification suites.

The three-dimensional starred complexes have ranks ``(a, b, b, a)``.
``selfdual_hodge_complex`` builds one whose flat codifferential is exactly
the Hermitian adjoint of the differential:

    delta_0 = A,  delta_1 = U_1 S,  delta_2 = -U_0 A^* U_1^{-1},
    stars   = (U_0, U_1, U_1^{-1}, U_0^{-1}),

with ``A`` of full rank, ``U_q`` unitary and ``S`` Hermitian with kernel
``im A``. Then ``Delta`` is the usual Hodge Laplacian.
"""

from __future__ import annotations

import numpy as np

from .core import ComplexLength, GeodesicClass, LengthSpectrum
from .regdet import SpectralData
from .torsion import CochainComplex, StarStructure, ZeroModeData

__all__ = [
    "random_complex_matrix",
    "random_unitary",
    "selfdual_hodge_complex",
    "random_starred_complex",
    "planted_kernel_matrix",
    "fried_fixture_spectra",
    "park_like_zero_modes",
    "cyclic_spectrum",
]


def random_complex_matrix(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng: np.random.Generator, n: int, special: bool = False) -> np.ndarray:
    q, r = np.linalg.qr(random_complex_matrix(rng, n, n))
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    if special and n:
        q = q / np.linalg.det(q) ** (1.0 / n)
    return q


def _complement_projector(a: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the complement of the column space of ``a``."""
    b = a.shape[0]
    if a.shape[1] == 0:
        return np.eye(b, dtype=complex)
    u, sv, _ = np.linalg.svd(a)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0]))) if sv.size else 0
    q = u[:, :rank]
    return np.eye(b) - q @ q.conj().T


def selfdual_hodge_complex(rng: np.random.Generator, a: int, b: int, kernel: int = 0,
                           special: bool = True) -> tuple[CochainComplex, StarStructure]:
    """Starred complex with ranks ``(a, b, b, a)`` and ``d* = delta^*``.

    ``kernel`` extra dimensions are removed from ``S``, giving Betti
    numbers ``(0, kernel, kernel, 0)``. With ``special`` the unitary stars
    have determinant one.
    """
    if not 0 <= a <= b or kernel > b - a:
        raise ValueError("need 0 <= a <= b and kernel <= b - a")
    big_a = random_complex_matrix(rng, b, a)
    u0 = random_unitary(rng, a, special)
    u1 = random_unitary(rng, b, special)
    p = _complement_projector(big_a)
    # Hermitian S on the complement, of rank b - a - kernel
    basis = np.linalg.qr(p @ random_complex_matrix(rng, b, b - a))[0][:, : b - a - kernel]
    eig = rng.uniform(0.5, 2.0, basis.shape[1]) * rng.choice([-1.0, 1.0], basis.shape[1])
    s = basis @ np.diag(eig) @ basis.conj().T
    d0 = big_a
    d1 = u1 @ s
    d2 = -u0 @ big_a.conj().T @ np.linalg.inv(u1)
    cx = CochainComplex((a, b, b, a), (d0, d1, d2))
    star = StarStructure((u0, u1, np.linalg.inv(u1), np.linalg.inv(u0)))
    return cx, star


def random_starred_complex(rng: np.random.Generator, a: int, b: int, kernel: int = 0,
                           cond: float = 3.0) -> tuple[CochainComplex, StarStructure]:
    """Generic complex with ranks ``(a, b, b, a)`` and non-unitary stars.

    ``delta_1`` has rank ``b - a - kernel``, so the complex is acyclic for
    ``kernel = 0``. The stars are random invertible matrices paired with
    their inverses, with singular values spread over roughly ``cond``.
    """
    d0 = random_complex_matrix(rng, b, a)
    r1 = b - a - kernel
    d1 = random_complex_matrix(rng, b, r1) @ random_complex_matrix(rng, r1, b) @ \
        _complement_projector(d0)
    p1 = _complement_projector(d1)
    d2 = random_complex_matrix(rng, a, b) @ p1

    def invertible(n):
        u, v = random_unitary(rng, n), random_unitary(rng, n)
        return u @ np.diag(np.exp(rng.uniform(0, np.log(cond), n))) @ v

    g0, g1 = invertible(a), invertible(b)
    cx = CochainComplex((a, b, b, a), (d0, d1, d2))
    star = StarStructure((g0, g1, np.linalg.inv(g1), np.linalg.inv(g0)))
    return cx, star


def planted_kernel_matrix(rng: np.random.Generator, n: int, blocks) -> np.ndarray:
    """``P J P^-1`` with nilpotent Jordan blocks of the given sizes and a random invertible rest.

    The nonzero eigenvalues have real parts in ``[1, 3]``.
    """
    h = int(sum(blocks))
    j = np.zeros((n, n), dtype=complex)
    pos = 0
    for size in blocks:
        for i in range(size - 1):
            j[pos + i, pos + i + 1] = 1.0
        pos += size
    m = n - h
    if m:
        eig = rng.uniform(1.0, 3.0, m) + 1j * rng.uniform(-1.0, 1.0, m)
        upper = np.triu(random_complex_matrix(rng, m, m), 1) * 0.3
        j[h:, h:] = np.diag(eig) + upper
    p = random_unitary(rng, n) @ np.diag(rng.uniform(1.0, 2.0, n)) @ random_unitary(rng, n)
    return p @ j @ np.linalg.inv(p)


def fried_fixture_spectra() -> list[SpectralData]:
    """Degrees 0..3 with ``h = (1, 2, 2, 1)``: ``{0, 3}``, ``{0, 0, 3, 5}``, mirrored."""
    s0 = SpectralData(((0.0, 1), (3.0, 1)))
    s1 = SpectralData(((0.0, 2), (3.0, 1), (5.0, 1)))
    return [s0, s1, s1, s0]


def park_like_zero_modes() -> ZeroModeData:
    """Zero-mode data with ``h = (1, 2, 2, 1)`` and an acyclic restricted differential.

    The restricted complex is ``e -> (1, 0)``, ``(x, y) -> (0, y)``,
    ``(u, v) -> sqrt(2) u`` in the standard bases, whose squared torsion has
    modulus 2.
    """
    h = (1, 2, 2, 1)
    bases = tuple(np.eye(k, dtype=complex) for k in h)
    d0 = np.array([[1.0], [0.0]], dtype=complex)
    d1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    d2 = np.array([[np.sqrt(2.0), 0.0]], dtype=complex)
    codiff = tuple(np.zeros((h[q - 1], h[q]), dtype=complex) for q in range(1, 4))
    spectra = tuple(SpectralData(()) for _ in h)
    return ZeroModeData(h, bases, spectra, (d0, d1, d2), codiff, (False,) * 4, (np.inf,) * 4)


def cyclic_spectrum(ell0: float, theta0: float, cutoff: float, inverse_pair: bool = True,
                    growth: tuple[float, float] | None = None) -> LengthSpectrum:
    """Spectrum of a cyclic loxodromic group: powers of one class (and of its inverse)."""
    classes = []
    k = 1
    while k * ell0 <= cutoff:
        for tag in ("a", "b") if inverse_pair else ("a",):
            theta = k * theta0
            classes.append(GeodesicClass(
                f"{tag}{k:04d}", ComplexLength(k * ell0, theta), power=k,
                primitive_id=f"{tag}0001",
                holonomy_eigenvalues=(np.exp(1j * theta), np.exp(-1j * theta))))
        k += 1
    if growth is None:
        # N(R) <= m R / ell0 <= m exp(R / ell0) with m classes per length
        growth = (2.0 if inverse_pair else 1.0, 1.0 / ell0)
    return LengthSpectrum(tuple(classes), cutoff, 3, growth)

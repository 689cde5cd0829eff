"""Length spectra of three-dimensional hyperbolic groups from word enumeration.

Conjugacy classes are found by brute force: freely and cyclically reduced
words are multiplied out, exact free-group conjugacy (cyclic rotation) is
removed first, and the remaining words are bucketed by trace and complex
length. Relators are not used; the bucketing is what merges words that are
conjugate only through a relation.
"""

from __future__ import annotations

import cmath
import math
import warnings
from collections import deque
from dataclasses import replace

import numpy as np

from .core import (
    TWO_PI,
    ComplexLength,
    GeodesicClass,
    GroupPresentation,
    LengthSpectrum,
    normalize_angle,
)
from .errors import (
    AmbiguousDecomposition,
    BudgetExceeded,
    CutoffExceeded,
    DimensionMismatch,
    NotLoxodromic,
)

__all__ = [
    "complex_length_of",
    "enumerate_classes",
    "primitive_decompose",
    "counting_function",
    "ad_restricted_eigenvalues",
    "cyclic_key",
    "word_root",
    "inverse_word",
    "fit_growth",
]

LOXODROMIC_MARGIN = 1e-8
BUCKET_TOL = 1e-8
DEFAULT_NODE_LIMIT = 2_000_000


def _large_eigenvalue(g: np.ndarray) -> complex:
    g = np.asarray(g, dtype=complex)
    tr = g[0, 0] + g[1, 1]
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    root = cmath.sqrt(tr * tr - 4.0 * det)
    lam1, lam2 = (tr + root) / 2.0, (tr - root) / 2.0
    return lam1 if abs(lam1) >= abs(lam2) else lam2


def complex_length_of(g) -> ComplexLength:
    """Complex length ``(2 log|lam|, 2 arg lam)`` of a loxodromic element.

    ``lam`` is the eigenvalue of modulus larger than one.

    Raises
    ------
    NotLoxodromic
        If ``|lam| <= 1 + 1e-8``.
    """
    lam = _large_eigenvalue(g)
    if abs(lam) <= 1.0 + LOXODROMIC_MARGIN:
        raise NotLoxodromic(f"largest eigenvalue modulus {abs(lam)!r} is not > 1")
    return ComplexLength(2.0 * math.log(abs(lam)), normalize_angle(2.0 * cmath.phase(lam)))


# ---------------------------------------------------------------- words


def inverse_word(word):
    return tuple(-w for w in reversed(word))


def cyclic_key(word) -> tuple[int, ...]:
    """Lexicographically smallest rotation; equal keys mean conjugate in the free group."""
    word = tuple(word)
    if not word:
        return word
    return min(word[i:] + word[:i] for i in range(len(word)))


def word_root(word) -> tuple[tuple[int, ...], int]:
    """Return ``(u, k)`` with ``word == u * k`` and ``k`` maximal."""
    word = tuple(word)
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p], n // p
    return word, 1


def _word_matrix(gens, invs, word):
    m = np.eye(2, dtype=complex)
    for w in word:
        m = m @ (gens[w - 1] if w > 0 else invs[-w - 1])
    return m


def _holonomy(theta: float) -> tuple[complex, complex]:
    return (cmath.exp(1j * theta), cmath.exp(-1j * theta))


def _angle_close(a: float, b: float, tol: float) -> bool:
    diff = math.fmod(abs(a - b), TWO_PI)
    return min(diff, TWO_PI - diff) <= tol


def enumerate_classes(
    pres: GroupPresentation,
    max_word_len: int,
    cutoff: float,
    merge_inverses: bool = False,
    node_limit: int = DEFAULT_NODE_LIMIT,
    growth: tuple[float, float] | None = None,
) -> LengthSpectrum:
    """Enumerate conjugacy classes of length at most ``cutoff``.

    Parameters
    ----------
    pres : GroupPresentation
        Generators in SL(2, C). Discreteness is assumed, not checked.
    max_word_len : int
        Longest word examined. Completeness up to ``cutoff`` holds only if
        this is large enough; the value is recorded on the result.
    cutoff : float
        Classes with ``ell > cutoff`` are dropped.
    merge_inverses : bool
        By default ``[g]`` and ``[g^-1]`` are distinct classes (they share
        trace and complex length). With ``True`` one class is kept per pair.
    node_limit : int
        Maximum number of reduced words visited before
        :class:`BudgetExceeded` is raised.
    growth : (float, float), optional
        Counting-growth metadata stored on the spectrum.

    Returns
    -------
    LengthSpectrum
        Sorted by length, closed under powers up to ``cutoff``, with
        deterministic class ids.
    """
    gens = pres.generators
    invs = tuple(np.linalg.inv(g) for g in gens)
    letters = [i for j in range(1, pres.rank + 1) for i in (j, -j)]

    found: dict[tuple[int, ...], tuple[np.ndarray, ComplexLength]] = {}
    queue = deque(((w,), gens[w - 1] if w > 0 else invs[-w - 1]) for w in letters)
    visited = 0
    while queue:
        word, mat = queue.popleft()
        visited += 1
        if visited > node_limit:
            raise BudgetExceeded(f"more than {node_limit} words for max_word_len={max_word_len}")
        if word[0] != -word[-1] or len(word) == 1:
            key = cyclic_key(word)
            if key not in found:
                try:
                    clen = complex_length_of(mat)
                except NotLoxodromic:
                    clen = None
                if clen is not None and clen.ell <= cutoff:
                    found[key] = (_word_matrix(gens, invs, key), clen)
        if len(word) < max_word_len:
            for w in letters:
                if w != -word[-1]:
                    queue.append((word + (w,), mat @ (gens[w - 1] if w > 0 else invs[-w - 1])))

    # close under powers so that every stored primitive has all its powers
    for key in sorted(found, key=len):
        root, k = word_root(key)
        if k > 1:
            continue
        mat, clen = found[key]
        j = 2
        while j * clen.ell <= cutoff * (1 + 1e-12):
            pkey = cyclic_key(key * j)
            if pkey not in found:
                pm = np.linalg.matrix_power(mat, j)
                found[pkey] = (pm, complex_length_of(pm))
            j += 1

    reps = _bucket(found, merge_inverses)
    order = sorted(reps, key=lambda k: (found[k][1].ell, found[k][1].theta, len(k), k))
    classes = []
    for i, key in enumerate(order):
        mat, clen = found[key]
        classes.append(
            GeodesicClass(
                class_id=f"c{i:05d}",
                clen=clen,
                holonomy_eigenvalues=_holonomy(clen.theta),
                word=key,
                trace_cache={"standard": complex(np.trace(mat))},
            )
        )
    spec = LengthSpectrum(tuple(classes), cutoff, 3, growth, max_word_len)
    return primitive_decompose(spec)


def _bucket(found, merge_inverses):
    """Pick one free-group class per conjugacy class (or per inverse pair)."""
    keys = sorted(found, key=lambda k: (len(k), k))
    buckets: list[list[tuple[int, ...]]] = []
    index: dict[tuple[int, int], list[int]] = {}
    for key in keys:
        mat, clen = found[key]
        tr = complex(np.trace(mat))
        cell = (round(clen.ell / BUCKET_TOL / 100), round(tr.real / BUCKET_TOL / 100))
        hit = None
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for b in index.get((cell[0] + dx, cell[1] + dy), ()):
                    m0, c0 = found[buckets[b][0]]
                    if (abs(c0.ell - clen.ell) <= BUCKET_TOL * max(1.0, clen.ell)
                            and _angle_close(c0.theta, clen.theta, BUCKET_TOL)
                            and abs(np.trace(m0) - tr) <= BUCKET_TOL * max(1.0, abs(tr))):
                        hit = b
                        break
                if hit is not None:
                    break
            if hit is not None:
                break
        if hit is None:
            index.setdefault(cell, []).append(len(buckets))
            buckets.append([key])
        else:
            buckets[hit].append(key)

    chosen = []
    for members in buckets:
        rep = members[0]
        chosen.append(rep)
        if not merge_inverses:
            inv = cyclic_key(inverse_word(rep))
            if inv != rep and inv in members:
                chosen.append(inv)
    return chosen


# ---------------------------------------------------------- decomposition


def primitive_decompose(spectrum: LengthSpectrum, tol: float = 1e-8) -> LengthSpectrum:
    """Assign every class its primitive root and power.

    A class is the ``k``-th power of an earlier primitive class when both
    ``ell = k * ell0`` and ``theta = k * theta0 (mod 2 pi)`` hold within
    ``tol``. Candidates sharing the same ``(ell0, theta0)`` (a class and its
    inverse) are told apart by their words when available. Genuinely
    different candidates trigger an :class:`AmbiguousDecomposition`
    warning and the shorter primitive wins.
    """
    prims: list[GeodesicClass] = []
    out: list[GeodesicClass] = []
    for c in spectrum.classes:
        cands = []
        for p in prims:
            k = round(c.ell / p.ell)
            if k < 2 or abs(c.ell - k * p.ell) > tol * max(1.0, c.ell):
                continue
            if not _angle_close(c.theta, normalize_angle(k * p.theta), tol * k):
                continue
            cands.append((p, k))
        if not cands:
            new = replace(c, power=1, primitive_id=c.class_id)
            prims.append(new)
            out.append(new)
            continue
        if c.word is not None:
            exact = [(p, k) for p, k in cands
                     if p.word is not None and cyclic_key(p.word * k) == cyclic_key(c.word)]
            if exact:
                cands = exact
        distinct = {round(p.ell / tol) for p, _ in cands}
        if len(distinct) > 1:
            warnings.warn(
                f"{c.class_id}: {len(cands)} primitive candidates "
                f"{[p.class_id for p, _ in cands]}; keeping the shortest",
                AmbiguousDecomposition,
                stacklevel=2,
            )
        p, k = min(cands, key=lambda pk: (pk[0].ell, pk[0].class_id))
        out.append(replace(c, power=k, primitive_id=p.class_id))
    return LengthSpectrum(tuple(out), spectrum.cutoff, spectrum.dim, spectrum.growth,
                          spectrum.max_word_len)


def counting_function(spectrum: LengthSpectrum, R: float) -> int:
    """Number of classes (primitive or not) with ``ell <= R``."""
    if R > spectrum.cutoff:
        raise CutoffExceeded(f"R={R} exceeds cutoff {spectrum.cutoff}")
    lengths = [c.ell for c in spectrum.classes]
    return int(np.searchsorted(lengths, R, side="right"))


def fit_growth(spectrum: LengthSpectrum, exponent: float) -> tuple[float, float]:
    """Smallest ``C`` with ``N(R) <= C exp(exponent R)`` on the stored data."""
    best = 0.0
    for i, c in enumerate(spectrum.classes):
        best = max(best, (i + 1) * math.exp(-exponent * c.ell))
    return (max(best, 1e-300), float(exponent))


def ad_restricted_eigenvalues(c: GeodesicClass, d: int) -> np.ndarray:
    """Eigenvalues ``exp(-ell) u_i`` of the adjoint action on the contracting directions."""
    if len(c.holonomy_eigenvalues) != d - 1:
        raise DimensionMismatch(
            f"{c.class_id}: {len(c.holonomy_eigenvalues)} holonomy eigenvalues for d={d}"
        )
    return math.exp(-c.ell) * np.asarray(c.holonomy_eigenvalues, dtype=complex)

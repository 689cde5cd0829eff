"""Shared domain types: geodesic classes, length spectra, presentations, reps.

All objects are frozen after construction. Spectra are stored sorted by
length so that every consumer sees the same class order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import FormatError, ValidationError

__all__ = [
    "TOL",
    "TWO_PI",
    "ComplexLength",
    "GeodesicClass",
    "LengthSpectrum",
    "GroupPresentation",
    "RepresentationSpec",
    "Violation",
    "validate_spectrum",
    "normalize_angle",
    "dumps_spectrum",
    "loads_spectrum",
    "read_spectrum",
    "write_spectrum",
    "dumps_representation",
    "loads_representation",
    "read_representation",
    "loads_presentation",
    "read_presentation",
    "dumps_presentation",
]

TOL = 1e-10
TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Map an angle to ``[0, 2*pi)``."""
    t = math.fmod(float(theta), TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


@dataclass(frozen=True)
class ComplexLength:
    """Length and holonomy angle of a closed geodesic."""

    ell: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.ell > 0.0:
            raise ValidationError(f"geodesic length must be positive, got {self.ell}")
        object.__setattr__(self, "ell", float(self.ell))
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def complex_value(self) -> complex:
        return complex(self.ell, self.theta)


@dataclass(frozen=True)
class GeodesicClass:
    """One conjugacy class of the fundamental group.

    ``holonomy_eigenvalues`` are the unit-modulus eigenvalues of the
    holonomy acting on the contracting directions, before scaling by
    ``exp(-ell)``. ``word`` is optional and only present for classes
    produced by word enumeration; it is what lets a representation given
    on generators be evaluated on the class.
    """

    class_id: str
    clen: ComplexLength
    power: int = 1
    primitive_id: str | None = None
    holonomy_eigenvalues: tuple[complex, ...] = ()
    word: tuple[int, ...] | None = None
    trace_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 1:
            raise ValidationError(f"{self.class_id}: power must be a positive integer")
        object.__setattr__(self, "power", int(self.power))
        if self.primitive_id is None:
            object.__setattr__(self, "primitive_id", self.class_id)
        object.__setattr__(
            self, "holonomy_eigenvalues", tuple(complex(u) for u in self.holonomy_eigenvalues)
        )
        if self.word is not None:
            object.__setattr__(self, "word", tuple(int(w) for w in self.word))

    @property
    def ell(self) -> float:
        return self.clen.ell

    @property
    def theta(self) -> float:
        return self.clen.theta

    @property
    def is_primitive(self) -> bool:
        return self.power == 1 and self.primitive_id == self.class_id


def _class_sort_key(c: GeodesicClass):
    return (c.ell, c.theta, c.class_id)


@dataclass(frozen=True)
class LengthSpectrum:
    """Conjugacy classes with ``ell <= cutoff`` for a manifold of odd dimension."""

    classes: tuple[GeodesicClass, ...]
    cutoff: float
    dim: int = 3
    growth: tuple[float, float] | None = None
    max_word_len: int | None = None

    def __post_init__(self):
        if self.dim < 1 or self.dim % 2 == 0:
            raise ValidationError(f"dimension must be odd, got {self.dim}")
        object.__setattr__(self, "classes", tuple(sorted(self.classes, key=_class_sort_key)))
        object.__setattr__(self, "cutoff", float(self.cutoff))
        if self.growth is not None:
            object.__setattr__(self, "growth", (float(self.growth[0]), float(self.growth[1])))

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    @property
    def n(self) -> int:
        """Half of ``dim - 1``; equals the norm of rho for SO0(d, 1)."""
        return (self.dim - 1) // 2

    def by_id(self) -> dict[str, GeodesicClass]:
        return {c.class_id: c for c in self.classes}

    def primitives(self) -> list[GeodesicClass]:
        return [c for c in self.classes if c.is_primitive]

    def restrict(self, cutoff: float) -> "LengthSpectrum":
        """Sub-spectrum of classes with ``ell <= cutoff``."""
        if cutoff > self.cutoff:
            cutoff = self.cutoff
        kept = tuple(c for c in self.classes if c.ell <= cutoff)
        return LengthSpectrum(kept, cutoff, self.dim, self.growth, self.max_word_len)

    def with_growth(self, growth) -> "LengthSpectrum":
        return LengthSpectrum(self.classes, self.cutoff, self.dim, growth, self.max_word_len)


@dataclass(frozen=True)
class GroupPresentation:
    """Generators in SL(2, C) for a three-dimensional hyperbolic group."""

    generators: tuple[np.ndarray, ...]
    relators: tuple[tuple[int, ...], ...] = ()
    dim: int = 3

    def __post_init__(self):
        if self.dim != 3:
            raise ValidationError("only d = 3 has a matrix-group front end")
        gens = []
        for i, g in enumerate(self.generators):
            g = np.array(g, dtype=complex)
            if g.shape != (2, 2):
                raise ValidationError(f"generator {i + 1} is not 2x2")
            if abs(np.linalg.det(g) - 1.0) > TOL:
                raise ValidationError(f"generator {i + 1} does not have determinant 1")
            g.setflags(write=False)
            gens.append(g)
        object.__setattr__(self, "generators", tuple(gens))
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))

    @property
    def rank(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class RepresentationSpec:
    """Finite dimensional representation given on generators.

    ``source`` records how the images were produced, e.g.
    ``("sym", m, presentation)`` for a symmetric power, so that the Cartan
    twist can be pushed through the construction.
    """

    generator_images: tuple[np.ndarray, ...]
    unitary_flag: bool = False
    growth_constants: tuple[float, float] | None = None
    source: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        imgs = [np.array(a, dtype=complex) for a in self.generator_images]
        if imgs:
            n = imgs[0].shape[0]
            for i, a in enumerate(imgs):
                if a.shape != (n, n):
                    raise ValidationError(f"image {i + 1} has shape {a.shape}, expected {(n, n)}")
                if not np.isfinite(np.linalg.cond(a)):
                    raise ValidationError(f"image {i + 1} is not invertible")
                if self.unitary_flag:
                    err = np.linalg.norm(a.conj().T @ a - np.eye(n), 2)
                    if err > TOL:
                        raise ValidationError(f"image {i + 1} is flagged unitary but is not")
                a.setflags(write=False)
        object.__setattr__(self, "generator_images", tuple(imgs))

    @property
    def dim_rep(self) -> int:
        return self.generator_images[0].shape[0] if self.generator_images else 1

    @cached_property
    def inverse_images(self) -> tuple[np.ndarray, ...]:
        return tuple(np.linalg.inv(a) for a in self.generator_images)


# ---------------------------------------------------------------- validation


@dataclass(frozen=True, order=True)
class Violation:
    class_id: str
    invariant: str
    detail: str = ""


def _multiset_close(a: Sequence[complex], b: Sequence[complex], tol: float) -> bool:
    if len(a) != len(b):
        return False
    remaining = list(b)
    for x in a:
        j = min(range(len(remaining)), key=lambda i: abs(remaining[i] - x))
        if abs(remaining[j] - x) > tol:
            return False
        remaining.pop(j)
    return True


def validate_spectrum(spec: LengthSpectrum, tol: float = TOL) -> list[Violation]:
    """Check the invariants of a length spectrum.

    Returns a sorted list of :class:`Violation`; empty means consistent.
    Never raises on bad data.
    """
    out: set[Violation] = set()
    ids: dict[str, GeodesicClass] = {}
    for c in spec.classes:
        if c.class_id in ids:
            out.add(Violation(c.class_id, "duplicate id"))
        ids[c.class_id] = c

    for c in spec.classes:
        if c.ell > spec.cutoff * (1 + tol):
            out.add(Violation(c.class_id, "beyond cutoff", f"ell={c.ell!r}"))
        if c.holonomy_eigenvalues:
            if len(c.holonomy_eigenvalues) != spec.dim - 1:
                out.add(Violation(c.class_id, "holonomy size",
                                  f"{len(c.holonomy_eigenvalues)} != {spec.dim - 1}"))
            for u in c.holonomy_eigenvalues:
                if abs(abs(u) - 1.0) > tol:
                    out.add(Violation(c.class_id, "non-unit holonomy", f"|u|={abs(u)!r}"))
                    break
        prim = ids.get(c.primitive_id)
        if prim is None:
            out.add(Violation(c.class_id, "unknown primitive", str(c.primitive_id)))
            continue
        if prim is c:
            if c.power != 1:
                out.add(Violation(c.class_id, "self-primitive with power != 1"))
            continue
        if not prim.is_primitive:
            out.add(Violation(c.class_id, "primitive is not primitive", prim.class_id))
        if abs(c.ell - c.power * prim.ell) > tol * max(1.0, c.ell):
            out.add(Violation(c.class_id, "power length mismatch",
                              f"{c.ell!r} != {c.power} * {prim.ell!r}"))
        if c.holonomy_eigenvalues and prim.holonomy_eigenvalues:
            powered = [u ** c.power for u in prim.holonomy_eigenvalues]
            if not _multiset_close(c.holonomy_eigenvalues, powered, 1e-9):
                out.add(Violation(c.class_id, "power holonomy mismatch"))

    present = {(c.primitive_id, c.power) for c in spec.classes}
    for c in spec.classes:
        if not c.is_primitive:
            continue
        kmax = int(math.floor(spec.cutoff / c.ell * (1 + tol)))
        for k in range(2, kmax + 1):
            if (c.class_id, k) not in present:
                out.add(Violation(c.class_id, "missing power", f"k={k}"))
    return sorted(out)


# ----------------------------------------------------------------------- IO


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _unpair(p) -> complex:
    if isinstance(p, (int, float)):
        return complex(p)
    if len(p) != 2:
        raise FormatError(f"expected [re, im], got {p!r}")
    return complex(float(p[0]), float(p[1]))


def _matrix_to_json(a: np.ndarray) -> list:
    return [_pair(z) for z in np.asarray(a).ravel()]


def _matrix_from_json(obj, n: int | None = None) -> np.ndarray:
    """Accept row-major flat ``[[re, im], ...]`` or nested rows."""
    if obj and isinstance(obj[0], list) and obj[0] and isinstance(obj[0][0], list):
        return np.array([[_unpair(p) for p in row] for row in obj], dtype=complex)
    flat = np.array([_unpair(p) for p in obj], dtype=complex)
    if n is None:
        n = int(round(math.sqrt(flat.size)))
    if n * n != flat.size:
        raise FormatError(f"cannot reshape {flat.size} entries into a square matrix")
    return flat.reshape(n, n)


def _dumps_line(obj) -> str:
    return json.dumps(obj, separators=(", ", ": "))


def dumps_spectrum(spec: LengthSpectrum) -> str:
    """Serialize to JSON lines: one header, then one object per class."""
    header = {"format": "spectrum.v1", "dim": spec.dim, "cutoff": spec.cutoff}
    if spec.growth is not None:
        header["growth"] = list(spec.growth)
    if spec.max_word_len is not None:
        header["max_word_len"] = spec.max_word_len
    lines = [_dumps_line(header)]
    for c in spec.classes:
        obj = {
            "id": c.class_id,
            "ell": c.ell,
            "theta": c.theta,
            "power": c.power,
            "primitive_id": c.primitive_id,
            "holonomy": [_pair(u) for u in c.holonomy_eigenvalues],
        }
        if c.word is not None:
            obj["word"] = list(c.word)
        lines.append(_dumps_line(obj))
    return "\n".join(lines) + "\n"


def loads_spectrum(text: str) -> LengthSpectrum:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty spectrum file")
    try:
        header = json.loads(lines[0])
        rows = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise FormatError(str(exc)) from exc
    if header.get("format") != "spectrum.v1":
        raise FormatError("missing spectrum.v1 header")
    classes = []
    for r in rows:
        try:
            classes.append(
                GeodesicClass(
                    class_id=str(r["id"]),
                    clen=ComplexLength(r["ell"], r.get("theta", 0.0)),
                    power=r.get("power", 1),
                    primitive_id=r.get("primitive_id"),
                    holonomy_eigenvalues=tuple(_unpair(p) for p in r.get("holonomy", [])),
                    word=r.get("word"),
                )
            )
        except KeyError as exc:
            raise FormatError(f"class entry missing {exc}") from exc
    growth = header.get("growth")
    return LengthSpectrum(
        tuple(classes),
        header["cutoff"],
        header.get("dim", 3),
        tuple(growth) if growth is not None else None,
        header.get("max_word_len"),
    )


def read_spectrum(path) -> LengthSpectrum:
    return loads_spectrum(Path(path).read_text())


def write_spectrum(spec: LengthSpectrum, path) -> None:
    Path(path).write_text(dumps_spectrum(spec))


def dumps_representation(rep: RepresentationSpec) -> str:
    obj = {
        "format": "rep.v1",
        "dim_rep": rep.dim_rep,
        "generators": [_matrix_to_json(a) for a in rep.generator_images],
        "unitary": bool(rep.unitary_flag),
    }
    if rep.growth_constants is not None:
        obj["growth_constants"] = list(rep.growth_constants)
    return json.dumps(obj)


def loads_representation(text: str) -> RepresentationSpec:
    obj = json.loads(text)
    if obj.get("format") != "rep.v1":
        raise FormatError("missing rep.v1 format tag")
    n = int(obj["dim_rep"])
    gens = tuple(_matrix_from_json(g, n) for g in obj["generators"])
    gc = obj.get("growth_constants")
    return RepresentationSpec(gens, bool(obj.get("unitary", False)),
                              tuple(gc) if gc is not None else None)


def read_representation(path) -> RepresentationSpec:
    return loads_representation(Path(path).read_text())


def dumps_presentation(pres: GroupPresentation) -> str:
    return json.dumps({
        "format": "group.v1",
        "dim": pres.dim,
        "generators": [_matrix_to_json(g) for g in pres.generators],
        "relators": [list(r) for r in pres.relators],
    })


def loads_presentation(text: str) -> GroupPresentation:
    obj = json.loads(text)
    if obj.get("format") != "group.v1":
        raise FormatError("missing group.v1 format tag")
    gens = tuple(_matrix_from_json(g, 2) for g in obj["generators"])
    return GroupPresentation(gens, tuple(tuple(r) for r in obj.get("relators", [])),
                             obj.get("dim", 3))


def read_presentation(path) -> GroupPresentation:
    return loads_presentation(Path(path).read_text())

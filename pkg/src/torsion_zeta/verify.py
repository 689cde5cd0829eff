"""Bundled verification suites with machine-readable reports.

Each suite returns ``{"suite", "cases", "all_pass", "seed"}`` where every
case is ``{"name", "expected", "got", "tol", "pass"}``. Cases are sorted by
name and every random draw comes from a generator seeded by ``(seed, case
index)``, so the same configuration always yields the same report,
whatever the thread count.
"""

from __future__ import annotations

import cmath
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Callable

import numpy as np

from .core import loads_presentation
from .errors import FixtureMissing, FormatError
from .geodesics import enumerate_classes, fit_growth
from .models import (
    cyclic_spectrum,
    fried_fixture_spectra,
    park_like_zero_modes,
    random_starred_complex,
    selfdual_hodge_complex,
)
from .regdet import (
    SpectralData,
    TailModel,
    loads_spectral_data,
    reg_det_finite,
    reg_det_with_tail,
)
from .reps import SymmetricPowerOfLength, symmetric_power_rep, trace_growth_constants
from .torsion import (
    cappell_miller_torsion,
    duality_check,
    flat_laplacian,
    fried_constant,
    fried_limit_check,
    order_h,
    reidemeister_torsion,
    t0_torsion,
    zero_modes,
)
from .zeta import log_euler_sum, resolve_trace_growth, ruelle_zeta, truncation_error_bound

__all__ = ["SUITES", "run_suite", "load_fixture", "load_spectra_file", "Case"]


@dataclass
class Case:
    name: str
    expected: object
    got: object
    tol: float
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "expected": _jsonable(self.expected),
                "got": _jsonable(self.got), "tol": self.tol, "pass": bool(self.passed)}


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def load_fixture(name: str) -> str:
    """Text of a bundled fixture file."""
    try:
        return resources.files("torsion_zeta").joinpath("fixtures").joinpath(name).read_text()
    except (FileNotFoundError, OSError) as exc:
        raise FixtureMissing(f"fixture {name!r} is not installed") from exc


def load_spectra_file(text: str) -> tuple[int, list[SpectralData]]:
    """Parse ``{"format": "spectra.v1", "d": d, "degrees": [spectrum JSON, ...]}``."""
    obj = json.loads(text)
    if obj.get("format") != "spectra.v1":
        raise FormatError("expected a spectra.v1 file")
    return int(obj["d"]), [loads_spectral_data(json.dumps(s)) for s in obj["degrees"]]


# ------------------------------------------------------------------ suites


def _park(seed, tol):
    def c1(_):
        got = fried_constant(3, (1, 2, 2))
        return Case("constant_d3_h122", -4, got, 0.0, got == -4)

    def c2(_):
        got = order_h(3, (1, 2))
        return Case("order_d3_h12", 0, got, 0.0, got == 0)

    def c3(_):
        got = fried_constant(3, (0, 0, 0))
        return Case("constant_d3_zero", 1, got, 0.0, got == 1)

    def c4(_):
        got = abs(t0_torsion(park_like_zero_modes()).coeff)
        return Case("t0_modulus_park_like", 2.0, got, tol, abs(got - 2.0) <= tol)

    return [c1, c2, c3, c4]


def _fried(seed, tol, spectra=None, d=3):
    def fixture(_):
        specs = spectra if spectra is not None else fried_fixture_spectra()
        rep = fried_limit_check(specs, d)
        return Case("fixture_extrapolated", rep.rhs, rep.extrapolated, 1e-6,
                    rep.rel_deviation <= 1e-6)

    def zero_free(rng):
        degs = []
        for k in range(2):
            vals = rng.uniform(0.5, 4.0, 3) + 1j * rng.uniform(-1, 1, 3)
            degs.append(SpectralData.from_values(vals))
        specs = [degs[0], degs[1], degs[1], degs[0]]
        rep = fried_limit_check(specs, 3)
        return Case("zero_mode_free_at_zero", rep.rhs, rep.lhs_at_zero, 1e-10,
                    _rel(rep.lhs_at_zero, rep.rhs) <= 1e-10)

    return [fixture, zero_free]


def _duality(seed, tol, count=20):
    def make(i):
        def case(rng):
            a = int(rng.integers(1, 4))
            b = int(rng.integers(a + 1, 8))
            kernel = int(rng.integers(0, b - a)) if i % 2 else 0
            if i % 3 == 0:
                cx, star = selfdual_hodge_complex(rng, a, b, kernel)
            else:
                cx, star = random_starred_complex(rng, a, b, kernel)
            zm = zero_modes(flat_laplacian(cx, star), cx, star)
            ok = duality_check(zm, 3, 1e-8)
            return Case(f"complex_{i:02d}", True, ok, 1e-8, ok)
        return case
    return [make(i) for i in range(count)]


def _two_generator_spectrum():
    pres = loads_presentation(load_fixture("two_generator.json"))
    spec = enumerate_classes(pres, max_word_len=8, cutoff=10.0)
    return pres, spec.with_growth(fit_growth(spec, 1.0))


def _euler(seed, tol, count=50):
    cyc = cyclic_spectrum(1.3, 0.4, 24.0)
    pres, two = _two_generator_spectrum()
    std = symmetric_power_rep(pres, 1)
    fixtures = [
        ("cyclic_trivial", cyc, None, None),
        ("cyclic_sym2_sigma1", cyc, SymmetricPowerOfLength(2), 1),
        ("twogen_trivial", two, None, None),
        ("twogen_standard", two, std, 0),
    ]
    tgs = {name: (trace_growth_constants(rep, pres, spec) if rep is std else None)
           for name, spec, rep, _ in fixtures}

    def certified_sigma(spec, rep, tg, target=1e-12):
        """Smallest Re(s) on a grid whose truncation bound is below ``target``."""
        tg = tg or resolve_trace_growth(rep, spec, None)
        sig = tg[1] + spec.growth[1] + 0.05
        while truncation_error_bound(sig, 0.0, spec.cutoff, spec.growth, tg) > target:
            sig += 0.05
        return sig

    def make(i):
        name, spec, rep, sigma = fixtures[i % len(fixtures)]

        def case(rng):
            tg = tgs[name]
            lo = certified_sigma(spec, rep, tg)
            s = complex(rng.uniform(lo, lo + 2.0), rng.uniform(-10.0, 10.0))
            r = ruelle_zeta(spec, rep, sigma, s, trace_growth=tg)
            e = log_euler_sum(spec, rep, sigma, s, trace_growth=tg)
            err = _rel(r.value, e.value)
            return Case(f"oracle_{i:02d}_{name}", e.value, r.value, 1e-10, err <= 1e-10)
        return case

    def honored(j):
        name, spec, rep, sigma = fixtures[j]

        def case(rng):
            tg = tgs[name]
            lo = certified_sigma(spec, rep, tg, 1e-3)
            s = complex(lo + 0.5, 1.0)
            worst, ok = 0.0, True
            cuts = np.linspace(spec.cutoff / 2, spec.cutoff, 6)
            vals = [ruelle_zeta(spec.restrict(L), rep, sigma, s, trace_growth=tg) for L in cuts]
            for a, b in zip(vals, vals[1:]):
                moved = abs(cmath.log(b.value / a.value))
                worst = max(worst, moved / a.abs_log_error)
                ok &= moved <= a.abs_log_error
            return Case(f"bound_honored_{name}", "<= 1", worst, 0.0, ok)
        return case

    return [make(i) for i in range(count)] + [honored(j) for j in range(len(fixtures))]


def _regdet(seed, tol, count=100):
    def branch(theta, label):
        def case(_):
            got = reg_det_finite(SpectralData(((1, 1), (1j, 1))), theta)
            return Case(f"branch_one_i_{label}", 1j, got, 1e-12, _rel(got, 1j) <= 1e-12)
        return case

    def circle(_):
        items = tuple((float(k * k), 2) for k in range(1, 201))
        spec = SpectralData(items, TailModel(1, (math.sqrt(math.pi), -1.0)))
        got = reg_det_with_tail(spec).value
        exp = (2 * math.pi) ** 2
        return Case("circle_K200", exp, got, 1e-3, abs(got - exp) <= 1e-3)

    def theta_independence(rng):
        worst = 0.0
        for _ in range(count):
            n = int(rng.integers(1, 12))
            vals = rng.uniform(-3, 3, n) + 1j * rng.uniform(-3, 3, n)
            mults = rng.integers(1, 4, n)
            spec = SpectralData(tuple(zip(vals, mults.tolist())))
            args = sorted(cmath.phase(v) for v in vals)
            gaps = [(args[(i + 1) % n] - args[i]) % (2 * math.pi) or 2 * math.pi
                    for i in range(n)]
            # two admissible angles in two different gaps when possible
            thetas = [args[i] + gaps[i] / 2 for i in range(n)][:2]
            if len(thetas) < 2:
                thetas.append(thetas[0] + gaps[0] / 4)
            a, b = (reg_det_finite(spec, t) for t in thetas)
            worst = max(worst, _rel(a, b))
        return Case(f"theta_independence_{count}", 0.0, worst, 1e-12, worst <= 1e-12)

    def finite_tail(rng):
        vals = rng.uniform(0.5, 5, 6) + 1j * rng.uniform(-2, 2, 6)
        spec = SpectralData(tuple((v, 1) for v in vals), TailModel(1, ()))
        got = reg_det_with_tail(spec).value
        exp = reg_det_finite(spec)
        return Case("finite_tail_consistency", exp, got, 1e-10, _rel(got, exp) <= 1e-10)

    return [branch(math.pi, "pi"), branch(1.5 * math.pi, "3pi2"), circle,
            theta_independence, finite_tail]


def _cm(seed, tol, count=50):
    def unitary(i):
        def case(rng):
            a = int(rng.integers(1, 4))
            b = int(rng.integers(a + 1, 9))
            cx, star = selfdual_hodge_complex(rng, a, b, special=True)
            big_t = cappell_miller_torsion(cx, star).coeff
            tau2 = reidemeister_torsion(cx, convention="ray-singer").coeff ** 2
            err = min(_rel(big_t, tau2), _rel(big_t, -tau2))
            return Case(f"su_star_{i:02d}", tau2, big_t, 1e-8, err <= 1e-8)
        return case

    def r_form(i):
        def case(rng):
            a = int(rng.integers(1, 3))
            b = int(rng.integers(a + 1, 6))
            cx, star = random_starred_complex(rng, a, b)
            zm = zero_modes(flat_laplacian(cx, star), cx, star)
            reals = sorted({round(lam.real, 9) for sp in zm.spectra[1:] for lam in sp.eigenvalues})
            mids = [(x + y) / 2 for x, y in zip(reals, reals[1:])]
            rs = [mids[len(mids) // 3], mids[-1]] if len(mids) >= 2 else [reals[0] - 1, reals[-1] + 1]
            theta_form = cappell_miller_torsion(cx, star, zero=zm).coeff
            worst = max(_rel(cappell_miller_torsion(cx, star, r=r, zero=zm).coeff, theta_form)
                        for r in rs)
            return Case(f"r_vs_theta_{i:02d}", theta_form, worst, 1e-9, worst <= 1e-9)
        return case

    return [unitary(i) for i in range(count)] + [r_form(i) for i in range(10)]


SUITES: dict[str, Callable] = {
    "park": _park,
    "fried": _fried,
    "duality": _duality,
    "euler": _euler,
    "regdet": _regdet,
    "cm-equals-reidemeister-squared": _cm,
}


def run_suite(name: str, seed: int = 0, tol: float = 1e-9, threads: int = 1, **kwargs) -> dict:
    """Run a suite and return its report."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    cases = SUITES[name](seed, tol, **kwargs)
    seqs = np.random.SeedSequence(seed).spawn(len(cases))

    def run(pair):
        fn, ss = pair
        return fn(np.random.default_rng(ss))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, zip(cases, seqs)))
    else:
        results = [run(p) for p in zip(cases, seqs)]
    results.sort(key=lambda c: c.name)
    return {
        "suite": name,
        "cases": [c.to_json() for c in results],
        "all_pass": all(c.passed for c in results),
        "seed": seed,
    }

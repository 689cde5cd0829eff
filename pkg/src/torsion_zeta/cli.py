"""Command-line front end: ``torsion-zeta {enumerate,zeta,regdet,torsion,verify}``.

Results go to stdout (or ``-o``) as JSON; a one-line human summary goes to
stderr. Exit status is 0 on success, 1 when a verification fails and 2 on
usage, input or numerical-precondition errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .core import (
    dumps_spectrum,
    read_presentation,
    read_representation,
    read_spectrum,
)
from .errors import FormatError, TorsionZetaError, ValidationError
from .geodesics import enumerate_classes
from .regdet import (
    SpectralData,
    agmon_angle,
    read_spectral_data,
    reg_det_finite,
    reg_det_with_tail,
    tail_from_json,
)
from .reps import SymmetricPowerOfLength, symmetric_power_rep
from .torsion import cappell_miller_torsion, read_complex, reidemeister_torsion
from .verify import SUITES, load_spectra_file, run_suite
from .zeta import ruelle_zeta, selberg_zeta

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    """Everything a run depends on; echoed into verification reports."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    output: str | None = None
    tol: float = 1e-9
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError("--tol must be positive")
        if self.threads < 1:
            raise ValidationError("--threads must be at least 1")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _complex_arg(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def _pair_arg(text: str) -> tuple[float, float]:
    z = _complex_arg(text)
    return (z.real, z.imag)


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the flags without defaults so that a value given
        # before the subcommand is not overwritten
        dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--tol", type=float, default=dflt(1e-9), help="tolerance for checks")
        g.add_argument("--seed", type=int, default=dflt(0), help="seed for randomized suites")
        g.add_argument("--threads", type=int, default=dflt(1), help="worker threads")
        g.add_argument("-o", "--output", default=dflt(None),
                       help="write the JSON result here instead of stdout")
        return g

    common = global_flags(True)
    p = _Parser(prog="torsion-zeta", parents=[global_flags(False)],
                description="Zeta functions, regularized determinants and torsion.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", parents=[common], help="length spectrum from generators")
    e.add_argument("--group", required=True)
    e.add_argument("--max-word-len", type=int, required=True)
    e.add_argument("--cutoff", type=float, required=True)
    e.add_argument("--merge-inverses", action="store_true")
    e.add_argument("--growth", type=_pair_arg, help="C,g with N(R) <= C exp(g R)")
    e.add_argument("--node-limit", type=int, default=2_000_000)

    z = sub.add_parser("zeta", parents=[common], help="truncated Ruelle or Selberg product")
    z.add_argument("--spectrum", required=True)
    rep = z.add_mutually_exclusive_group()
    rep.add_argument("--rep", help="rep.v1 file (needs classes with words)")
    rep.add_argument("--sym-power", type=int, help="Sym^m evaluated from complex lengths")
    z.add_argument("--group", help="with --sym-power, build Sym^m on the generators instead")
    z.add_argument("--sigma", type=int, default=None)
    z.add_argument("--selberg", action="store_true")
    z.add_argument("--kmax", type=int, default=8)
    z.add_argument("--s", dest="s", type=_complex_arg, required=True)
    z.add_argument("--shift", default="auto", help="auto, 0, n, or a number")
    z.add_argument("--growth", type=_pair_arg)
    z.add_argument("--trace-growth", type=_pair_arg)

    r = sub.add_parser("regdet", parents=[common], help="regularized determinant")
    r.add_argument("--spectrum-json", required=True)
    r.add_argument("--theta", type=float, default=None)
    r.add_argument("--tail", help="JSON tail model overriding the one in the spectrum file")

    t = sub.add_parser("torsion", parents=[common], help="torsion of a starred complex")
    t.add_argument("--complex", required=True)
    g = t.add_mutually_exclusive_group()
    g.add_argument("--r", type=float)
    g.add_argument("--theta", type=float)
    t.add_argument("--reidemeister", action="store_true")
    t.add_argument("--convention", choices=["milnor", "ray-singer"], default="milnor")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--spectra", help="spectra.v1 file for the fried suite")
    v.add_argument("--d", type=int, default=None)
    return p


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _run_enumerate(a) -> dict | str:
    pres = read_presentation(a.group)
    spec = enumerate_classes(pres, a.max_word_len, a.cutoff, a.merge_inverses,
                             a.node_limit, a.growth)
    return dumps_spectrum(spec)


def _shift(text: str, spectrum, selberg: bool) -> float:
    if text == "auto":
        return float(spectrum.n) if selberg else 0.0
    if text == "n":
        return float(spectrum.n)
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"--shift must be auto, 0, n or a number, got {text!r}") from None


def _run_zeta(a) -> dict:
    spectrum = read_spectrum(a.spectrum)
    rep = None
    if a.rep:
        rep = read_representation(a.rep)
    elif a.sym_power is not None:
        rep = (symmetric_power_rep(read_presentation(a.group), a.sym_power) if a.group
               else SymmetricPowerOfLength(a.sym_power))
    shift = _shift(a.shift, spectrum, a.selberg)
    if a.selberg:
        if shift != spectrum.n:
            raise ValidationError("the Selberg product uses shift n")
        res = selberg_zeta(spectrum, rep, a.sigma, a.s, a.kmax, a.growth, a.trace_growth)
    else:
        res = ruelle_zeta(spectrum, rep, a.sigma, a.s, shift, a.growth, a.trace_growth)
    out = res.to_json()
    if math.isinf(out["abs_log_error"]):
        out["abs_log_error"] = "inf"
    return out


def _run_regdet(a) -> dict:
    spec = read_spectral_data(a.spectrum_json)
    if a.tail:
        spec = SpectralData(spec.items, tail_from_json(json.loads(Path(a.tail).read_text())))
    if spec.tail is not None:
        theta = math.pi if a.theta is None else a.theta
        res = reg_det_with_tail(spec, theta)
        return {"value": _c(res.value), "abs_log_error": res.abs_log_error,
                "method": "mellin", "theta": theta}
    theta = agmon_angle(spec).theta if a.theta is None else a.theta
    return {"value": _c(reg_det_finite(spec, theta)), "abs_log_error": 0.0,
            "method": "finite", "theta": theta}


def _run_torsion(a) -> dict:
    cx, star = read_complex(a.complex)
    if a.reidemeister:
        tv = reidemeister_torsion(cx, convention=a.convention)
        kind = "reidemeister"
    else:
        if star is None:
            raise FormatError("the complex file has no star; use --reidemeister")
        tv = cappell_miller_torsion(cx, star, r=a.r, theta=a.theta)
        kind = "cappell-miller"
    return {"kind": kind, "coeff": _c(tv.coeff), "sign_ambiguous": tv.sign_ambiguous,
            "reference_bases": list(tv.reference_bases)}


def _run_verify(a, cfg: RunConfig) -> dict:
    kwargs = {}
    if a.suite == "fried" and a.spectra:
        d, spectra = load_spectra_file(Path(a.spectra).read_text())
        if a.d is not None and a.d != d:
            raise ValidationError(f"--d {a.d} does not match the file (d={d})")
        kwargs = {"spectra": spectra, "d": d}
    return run_suite(a.suite, seed=cfg.seed, tol=cfg.tol, threads=cfg.threads, **kwargs)


def _emit(result, output: str | None):
    text = result if isinstance(result, str) else json.dumps(result, indent=2) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = RunConfig(a.subcommand, output=a.output, tol=a.tol, seed=a.seed, threads=a.threads)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if a.subcommand == "enumerate":
                result = _run_enumerate(a)
            elif a.subcommand == "zeta":
                result = _run_zeta(a)
            elif a.subcommand == "regdet":
                result = _run_regdet(a)
            elif a.subcommand == "torsion":
                result = _run_torsion(a)
            else:
                result = _run_verify(a, cfg)
        for w in caught:
            print(f"warning: {w.category.__name__}: {w.message}", file=sys.stderr)
    except (TorsionZetaError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"torsion-zeta: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(result, a.output)
    if a.subcommand == "verify":
        n_pass = sum(c["pass"] for c in result["cases"])
        status = "PASS" if result["all_pass"] else "FAIL"
        print(f"{result['suite']}: {status} ({n_pass}/{len(result['cases'])} cases, "
              f"seed {result['seed']})", file=sys.stderr)
        return EXIT_OK if result["all_pass"] else EXIT_FAIL
    print(f"{a.subcommand}: ok", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Batch front end: parse series, run pipelines, persist artifacts.

Every JSON artifact carries {"schema": "qsl/1", "version": ..., "config":
<resolved options>, "result": ...} and is written deterministically
(sorted keys, shortest round-trip floats), so identical configs and
inputs give byte-identical outputs.  Exit codes: 0 success, 2 violated
precondition or bad usage, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__, apcheck, cfourier, reconstruct, spectral, strip_zeros
from .errors import NumericError, PreconditionError, QslError
from .presets import PRESETS, preset
from .reconstruct import ReconstructionResult
from .spectral import AtomMeasure
from .strip_zeros import Rect, ZeroSet
from .wiener import ExpSum

SCHEMA = "qsl/1"


def _threads_cap() -> int:
    """Honor the QSL_THREADS cap; the pipelines here are sequential (1)."""
    raw = os.environ.get("QSL_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise PreconditionError(f"QSL_THREADS must be an integer, got {raw!r}")
    if cap < 1:
        raise PreconditionError("QSL_THREADS must be >= 1")
    return min(cap, 1)


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_series(args) -> ExpSum:
    if getattr(args, "preset", None):
        return preset(args.preset)
    if getattr(args, "input", None):
        return ExpSum.from_dict(_load_json(args.input))
    raise PreconditionError("provide --input FILE or --preset NAME")


def _parse_rect(text) -> Rect:
    try:
        x0, x1, y0, y1 = (float(v) for v in text.split(","))
        return Rect(x0, x1, y0, y1)
    except (ValueError, TypeError) as exc:
        raise PreconditionError(
            f"--rect wants x_min,x_max,y_min,y_max; got {text!r}") from exc


def _parse_zetas(text):
    out = []
    for chunk in text.split(";"):
        re_s, im_s = chunk.split(",")
        out.append(complex(float(re_s), float(im_s)))
    return out


def _parse_grid(text):
    return [float(v) for v in text.split(",")]


def _bump(args) -> cfourier.TestFunction:
    if getattr(args, "phi", None):
        return cfourier.TestFunction.from_dict(_load_json(args.phi))
    return cfourier.TestFunction(center=args.center, half_width=args.half_width)


def _write_json(path, config, result):
    doc = {"schema": SCHEMA, "version": __version__,
           "config": config, "result": result}
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _config_echo(args):
    skip = {"func"}
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = val
    out["threads"] = _threads_cap()
    return out


# -- commands ------------------------------------------------------------------

def _cmd_zeros(args):
    Q = _load_series(args)
    rect = _parse_rect(args.rect)
    zs = strip_zeros.find_zeros(Q, rect, args.tol)
    if zs.total >= 10:
        zs = strip_zeros.enumerate_zeros(zs)
    if args.format == "csv":
        _write_csv(args.output, ("re", "im", "mult"),
                   [(z.real, z.imag, m) for z, m in zs.points])
    else:
        _write_json(args.output, _config_echo(args), zs.to_dict())
    return 0


def _cmd_atoms(args):
    Q = _load_series(args)
    am = spectral.atoms(Q, args.tail_tol)
    if args.format == "csv":
        _write_csv(args.output, ("gamma", "re", "im"), am.csv_rows())
    else:
        _write_json(args.output, _config_echo(args), am.to_dict())
    return 0


def _cmd_pair(args):
    zs = ZeroSet.from_dict(_load_json(args.zeros)["result"])
    am = AtomMeasure.from_dict(_load_json(args.atoms)["result"])
    phi = _bump(args)
    report = spectral.verify_duality(zs, am, phi, args.pair_tail_tol)
    _write_json(args.output, _config_echo(args), report.to_dict())
    return 0


def _cmd_verify_der(args):
    zs = ZeroSet.from_dict(_load_json(args.zeros)["result"])
    am = AtomMeasure.from_dict(_load_json(args.atoms)["result"])
    zetas = _parse_zetas(args.zeta)
    report = spectral.verify_der(zs, am, zetas,
                                 tail_correction=not args.no_tail_correction)
    _write_json(args.output, _config_echo(args), report.to_dict())
    return 0


def _cmd_reconstruct(args):
    am = AtomMeasure.from_dict(_load_json(args.atoms)["result"])
    rec = reconstruct.from_atoms(am, y0=args.y0, tail_tol=args.tail_tol)
    _write_json(args.output, _config_echo(args), rec.to_dict())
    return 0


def _cmd_roundtrip(args):
    Q = _load_series(args)
    rec = ReconstructionResult.from_dict(_load_json(args.rec)["result"])
    rect = _parse_rect(args.rect)
    report = reconstruct.verify_roundtrip(Q, rec, rect, zero_tol=args.zero_tol)
    _write_json(args.output, _config_echo(args), report.to_dict())
    return 0


def _cmd_apcheck(args):
    zs = ZeroSet.from_dict(_load_json(args.zeros)["result"])
    step = args.tau_step if args.tau_step else args.epsilon / 4.0
    taus = np.arange(args.tau_min, args.tau_max + 0.5 * step, step)
    report = apcheck.almost_periods(zs, args.epsilon, taus)
    if args.format == "csv":
        _write_csv(args.output, ("tau", "max_displacement", "accepted"),
                   report.csv_rows())
        return 0
    result = report.to_dict()
    result["translation_bound"] = apcheck.translation_bound(zs)
    if zs.numbered:
        dens, cons = apcheck.density(zs, [0.45 * (zs.window.x_max
                                                  - zs.window.x_min)])
        result["density"] = dens
        result["density_rho_consistency"] = cons
    _write_json(args.output, _config_echo(args), result)
    return 0


def _cmd_growth(args):
    zs = ZeroSet.from_dict(_load_json(args.zeros)["result"]) if args.zeros else None
    am = AtomMeasure.from_dict(_load_json(args.atoms)["result"]) if args.atoms else None
    grid = _parse_grid(args.r_grid)
    diag = cfourier.growth(zs, am, grid)
    if args.format == "csv":
        _write_csv(args.output, ("r", "mass_count", "atom_cumsum"),
                   list(zip(diag.r_grid, diag.mass_counts, diag.atom_cumsums)))
    else:
        _write_json(args.output, _config_echo(args), diag.to_dict())
    return 0


# -- parser --------------------------------------------------------------------

def _add_series_source(p):
    p.add_argument("--input", help="ExpSum JSON file")
    p.add_argument("--preset", choices=PRESETS,
                   help="built-in closed-form series")


def _add_common(p):
    p.add_argument("--output", required=True, help="artifact path")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qsl",
        description="Zero sets of exponential sums on a strip and the "
                    "pure-point spectra of their counting measures.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", help="locate zeros in a rectangle")
    _add_series_source(p)
    p.add_argument("--rect", required=True, help="x_min,x_max,y_min,y_max")
    p.add_argument("--tol", type=float, default=1e-12)
    _add_common(p)
    p.set_defaults(func=_cmd_zeros)

    p = sub.add_parser("atoms", help="pure-point spectrum of the zero measure")
    _add_series_source(p)
    p.add_argument("--tail-tol", type=float, default=1e-10)
    _add_common(p)
    p.set_defaults(func=_cmd_atoms)

    p = sub.add_parser("pair", help="compare zero pairing with atom pairing")
    p.add_argument("--zeros", required=True)
    p.add_argument("--atoms", required=True)
    p.add_argument("--phi", help="test-function JSON file")
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--half-width", type=float, default=1.0)
    p.add_argument("--pair-tail-tol", type=float, default=1e-5)
    _add_common(p)
    p.set_defaults(func=_cmd_pair)

    p = sub.add_parser("verify-der",
                       help="log-derivative identity at sample points")
    p.add_argument("--zeros", required=True)
    p.add_argument("--atoms", required=True)
    p.add_argument("--zeta", required=True,
                   help="semicolon-separated re,im pairs, e.g. '0.1,1;0.7,1'")
    p.add_argument("--no-tail-correction", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_verify_der)

    p = sub.add_parser("reconstruct", help="series with the prescribed atoms")
    p.add_argument("--atoms", required=True)
    p.add_argument("--y0", type=float, default=None)
    p.add_argument("--tail-tol", type=float, default=1e-10)
    _add_common(p)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("roundtrip",
                       help="zero match and ratio constancy of a reconstruction")
    _add_series_source(p)
    p.add_argument("--rec", required=True, help="reconstruction JSON artifact")
    p.add_argument("--rect", required=True)
    p.add_argument("--zero-tol", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(func=_cmd_roundtrip)

    p = sub.add_parser("apcheck", help="almost-period scan of a zero set")
    p.add_argument("--zeros", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--tau-min", type=float, default=0.0)
    p.add_argument("--tau-max", type=float, required=True)
    p.add_argument("--tau-step", type=float, default=None,
                   help="defaults to epsilon/4")
    _add_common(p)
    p.set_defaults(func=_cmd_apcheck)

    p = sub.add_parser("growth", help="radial growth diagnostics")
    p.add_argument("--zeros")
    p.add_argument("--atoms")
    p.add_argument("--r-grid", required=True, help="comma-separated radii")
    _add_common(p)
    p.set_defaults(func=_cmd_growth)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"qsl: precondition violated: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"qsl: numeric failure: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"qsl: {exc}", file=sys.stderr)
        return 2
    except QslError as exc:  # pragma: no cover - future error classes
        print(f"qsl: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``razavy-qes <command> --M 4 --zeta 1 [...]``.

Each run writes one artifact (JSON or CSV) and prints a short summary.
Exit status is 0 on success, 1 for invalid input and 2 when a mathematical
check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bands import FIG2_COLUMNS, GAP_CONVENTION, classify, fig2_sweep
from .checks import verify
from .errors import InvalidParameters, RazavyError, VerificationError
from .families import TILDE_LABEL, FamilySpec, PotentialParams, hat_spec_from_label, make_tilde
from .oracle import FdConfig
from .polyseq import poly_sequence
from .spectrum import algebraic_energies, moment_functional, norm_sequence, expected_norms
from .wavefunc import hyperbolic_series, trig_series

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2
COMMANDS = ("poly", "spectrum", "moments", "wavefunction", "bands", "verify", "sweep")
JOBS_ENV = "RAZAVY_QES_JOBS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- serialization -------------------------------------------------------------------


def _json_scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _json_lines(obj, indent: int) -> str:
    pad, inner = " " * indent, " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{_json_scalar(str(k))}: {_json_lines(obj[k], indent + 2)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_json_scalar(v) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + _json_lines(v, indent + 2) for v in seq) + "\n" + pad + "]"
    return _json_scalar(obj)


def emit_json(result: dict) -> bytes:
    """Deterministic JSON: sorted keys, 17 significant digits, LF line endings."""
    return (_json_lines(result, 0) + "\n").encode("utf-8")


def _csv_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def emit_csv(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(x) for x in row])
    return buf.getvalue().encode("utf-8")


# -- argument handling ---------------------------------------------------------------


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="razavy-qes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--M", dest="m_int", type=int, help="integer M >= 1")
    common.add_argument("--zeta", type=float, help="zeta > 0")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", type=Path, help="artifact path (default: <command>.<format>)")
    common.add_argument("--config", type=Path, help="key=value file; command-line flags win")
    common.add_argument("--jobs", type=_positive_int, default=None,
                        help=f"worker threads for sweeps (default: ${JOBS_ENV} or 1)")
    common.add_argument("--L", dest="half_width", type=float, default=4.0, help="finite-difference half width")
    common.add_argument("--N", dest="points", type=int, default=4000, help="finite-difference intervals")
    common.add_argument("--K", dest="basis_cut", type=int, default=64, help="plane-wave cutoff")

    family = _Parser(add_help=False)
    family.add_argument("--family", choices=("tilde", "hat"), default="tilde")
    family.add_argument("--branch", help="hat branch: sigma=+1, sigma=-1, eta=+1 or eta=-1")
    family.add_argument("--periodic", action="store_true", help="periodic potential instead of the double well")

    p = sub.add_parser("poly", parents=[common, family], help="recurrence polynomials")
    p.add_argument("--k", type=int, help="highest degree (default: critical degree)")
    sub.add_parser("spectrum", parents=[common, family], help="algebraic energies")
    sub.add_parser("moments", parents=[common, family], help="moment functional and norms")
    p = sub.add_parser("wavefunction", parents=[common, family], help="sampled algebraic eigenfunction")
    p.add_argument("--index", type=int, default=0, help="state index within the family, by energy")
    p.add_argument("--form", default="real", help="periodic form: real, complex, ee, eo, oe or oo")
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--points", dest="grid_points", type=_positive_int, default=401)
    sub.add_parser("bands", parents=[common], help="place algebraic energies in the band structure")
    sub.add_parser("verify", parents=[common], help="run every property check at one (M, zeta)")
    p = sub.add_parser("sweep", parents=[common], help="band edges over a zeta grid")
    p.add_argument("--zeta-min", type=float, default=0.1)
    p.add_argument("--zeta-max", type=float, default=3.0)
    p.add_argument("--zeta-points", type=_positive_int, default=30)
    p.add_argument("--n-bands", type=_positive_int, default=5)
    return parser


def read_config(path: Path) -> list[str]:
    """Turn ``key = value`` lines into flags; ``true``/``false`` toggle switches."""
    tokens = []
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            tokens.append(flag)
        elif value.lower() not in ("false", "no", "off"):
            tokens += [flag, value]
    return tokens


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        # config values go first so that explicit flags override them
        i = argv.index(args.command) + 1
        args = parser.parse_args(argv[:i] + read_config(args.config) + argv[i:])
    if args.m_int is None:
        raise UsageError("--M is required")
    if args.command != "sweep" and args.zeta is None:
        raise UsageError("--zeta is required")
    if args.jobs is None:
        env = os.environ.get(JOBS_ENV, "1")
        try:
            args.jobs = _positive_int(env)
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError(f"{JOBS_ENV}={env!r} is not a positive integer")
    return args


def _params(args) -> PotentialParams:
    return PotentialParams(args.zeta, args.m_int)


def _family(args) -> FamilySpec:
    params = _params(args)
    if args.family == "tilde":
        if args.branch not in (None, TILDE_LABEL):
            raise InvalidParameters("--branch applies to hat families only")
        return make_tilde(params, periodic=args.periodic)
    if args.branch is None:
        raise InvalidParameters("--family hat needs --branch")
    return hat_spec_from_label(params, args.branch, periodic=args.periodic)


def _family_record(spec: FamilySpec) -> dict:
    return {
        "kind": spec.kind.value, "branch": spec.branch_label, "M": spec.params.m_int,
        "zeta": spec.params.zeta, "n": spec.n, "sigma": spec.sigma, "eta": spec.eta,
    }


# -- commands ------------------------------------------------------------------------


def cmd_poly(args):
    spec = _family(args)
    k = spec.critical_index if args.k is None else args.k
    if k < 0:
        raise InvalidParameters("--k must be >= 0")
    polys = poly_sequence(spec, k)
    record = {
        "family": _family_record(spec),
        "polynomials": [{"degree": p.degree, "coefficients": list(p.coeffs), "overflow": p.overflow}
                        for p in polys],
    }
    rows = [(p.degree, i, c) for p in polys for i, c in enumerate(p.coeffs)]
    top = polys[-1]
    summary = f"{spec.describe()}: P_{top.degree} constant term {top.coeffs[0]:.17g}"
    return record, (("degree", "power", "coefficient"), rows), summary


def cmd_spectrum(args):
    spec = _family(args)
    sp = algebraic_energies(spec)
    record = {
        "family": _family_record(spec),
        "energies": list(sp.energies),
        "min_root_separation": sp.min_root_separation,
        "max_imag_discarded": sp.max_imag_discarded,
    }
    rows = list(enumerate(sp.energies))
    summary = f"{spec.describe()}: energies " + ", ".join(f"{e:.12g}" for e in sp.energies)
    return record, (("index", "energy"), rows), summary


def cmd_moments(args):
    spec = _family(args)
    mf = moment_functional(spec)
    norms = norm_sequence(spec, spec.n + 1, mf)
    record = {
        "family": _family_record(spec),
        "nodes": list(mf.nodes64),
        "weights": list(mf.weights64),
        "norms": list(norms),
        "expected_norms": list(expected_norms(spec, spec.n + 1)),
        "system_residual": mf.system_residual,
    }
    rows = list(zip(range(mf.nodes.size), mf.nodes64, mf.weights64))
    negative = int(np.sum(mf.weights < 0))
    summary = f"{spec.describe()}: {mf.nodes.size} nodes, {negative} negative weights"
    return record, (("index", "node", "weight"), rows), summary


def cmd_wavefunction(args):
    spec = _family(args)
    energies = algebraic_energies(spec).energies
    if not 0 <= args.index < energies.size:
        raise InvalidParameters(f"--index must be in [0, {energies.size - 1}]")
    energy = float(energies[args.index])
    if spec.is_periodic:
        form = args.form
        if spec.is_hat and form == "complex":
            form = "real"
        series = trig_series(spec, energy, form)
        lo, hi = 0.0, 2 * np.pi
    else:
        series = hyperbolic_series(spec, energy)
        lo, hi = -2.0, 2.0
    lo = lo if args.x_min is None else args.x_min
    hi = hi if args.x_max is None else args.x_max
    if not hi > lo:
        raise InvalidParameters("--x-max must exceed --x-min")
    xs = np.linspace(lo, hi, args.grid_points)
    vals = np.asarray(series(xs))
    re, im = np.real(vals), np.imag(vals) if np.iscomplexobj(vals) else np.zeros_like(xs)
    record = {
        "family": _family_record(spec),
        "energy": energy,
        "index": args.index,
        "form": series.form,
        "x": list(xs), "re": list(re), "im": list(im),
    }
    summary = f"{spec.describe()}: state {args.index}, E={energy:.12g}, {xs.size} samples"
    return record, (("x", "re", "im"), list(zip(xs, re, im))), summary


def cmd_bands(args):
    cls = classify(_params(args), args.basis_cut)
    record = {
        "M": cls.m_int, "zeta": cls.zeta,
        "algebraic_energies": list(cls.algebraic_energies),
        "matched_edges": [
            {"label": f"{m.label[0]}:{m.label[1]}", "oracle_value": m.oracle_value,
             "algebraic_value": m.algebraic_value, "abs_error": m.abs_error}
            for m in cls.matched_edges
        ],
        "gap_indices": list(cls.gap_indices),
        "includes_ground_state": cls.includes_ground_state,
        "closed_gaps": list(cls.closed_gaps),
        "gap_convention": cls.gap_convention,
    }
    rows = [(m.label[0], m.label[1], m.oracle_value, m.algebraic_value, m.abs_error) for m in cls.matched_edges]
    summary = (f"M={cls.m_int} zeta={cls.zeta:g}: gaps {list(cls.gap_indices)}"
               + (" plus ground state" if cls.includes_ground_state else ""))
    return record, (("type", "k", "oracle_value", "algebraic_value", "abs_error"), rows), summary


def cmd_verify(args):
    cfg = FdConfig(half_width=args.half_width, points=args.points)
    results = verify(_params(args), cfg, args.basis_cut)
    record = {
        "M": args.m_int, "zeta": args.zeta,
        "passed": all(r.passed for r in results),
        "checks": [{"name": r.name, "passed": r.passed, "value": r.value,
                    "tolerance": r.tolerance, "lower_bound": r.lower_bound, "detail": r.detail}
                   for r in results],
    }
    rows = [(r.name, r.passed, r.value, r.tolerance, r.detail) for r in results]
    failed = [r for r in results if not r.passed]
    lines = [r.line() for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return record, (("name", "passed", "value", "tolerance", "detail"), rows), "\n".join(lines)


def cmd_sweep(args):
    if args.zeta is not None:
        grid = np.array([args.zeta])
    else:
        grid = np.linspace(args.zeta_min, args.zeta_max, args.zeta_points)
    rows = fig2_sweep(args.m_int, grid, args.n_bands, args.basis_cut, args.jobs)
    record = {
        "M": args.m_int, "gap_convention": GAP_CONVENTION,
        "rows": [dict(zip(FIG2_COLUMNS, r)) for r in rows],
    }
    n_alg = sum(r[4] == "algebraic" for r in rows) + sum(r[5] == "algebraic" for r in rows)
    summary = f"M={args.m_int}: {grid.size} zeta values, {len(rows)} bands, {n_alg} algebraic edges"
    return record, (FIG2_COLUMNS, rows), summary


HANDLERS = {
    "poly": cmd_poly, "spectrum": cmd_spectrum, "moments": cmd_moments,
    "wavefunction": cmd_wavefunction, "bands": cmd_bands, "verify": cmd_verify, "sweep": cmd_sweep,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        record, (header, rows), summary = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidParameters as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (VerificationError, RazavyError) as exc:
        print(f"verification failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_VERIFY

    payload = emit_json(record) if args.format == "json" else emit_csv(header, rows)
    out = args.output or Path(f"{args.command}.{args.format}")
    try:
        out.write_bytes(payload)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(summary)
    print(f"wrote {out}")
    if args.command == "verify" and not record["passed"]:
        return EXIT_VERIFY
    return EXIT_OK


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())

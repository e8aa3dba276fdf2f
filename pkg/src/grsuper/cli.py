"""Command-line interface.

Global options may also be set through environment variables with the
``GRSUPER_`` prefix (``GRSUPER_CATALOG``, ``GRSUPER_R_MODEL``,
``GRSUPER_THRESHOLD``, ``GRSUPER_FORMAT``, ``GRSUPER_WORKERS``,
``GRSUPER_SEED``); command-line flags take precedence.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import CatalogError, builtin_catalog, load_catalog_file, parse_r_model
from .feasibility import SweepTooLarge, evaluate, min_quality_factor, min_quality_factor_bisect, sweep
from .report import DEFAULT_COLUMNS, SWEEP_COLUMNS, RenderSpec, parse_columns, render
from .selfenergy import STRATEGIES, ConvergenceError, IntegrationConfig, IntegrationError, superposition_energy

ENV_PREFIX = "GRSUPER_"


class DataError(Exception):
    """Bad input data (exit code 1)."""


def _env(name: str, default):
    return os.environ.get(ENV_PREFIX + name, default)


def _r_model(text):
    try:
        return parse_r_model(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _columns(text):
    try:
        return parse_columns(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_axis(text: str) -> list[float]:
    """``VALUE`` or ``START:STOP:POINTS[:log|lin]`` (log spacing by default)."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            vals = [float(parts[0])]
        elif len(parts) in (3, 4):
            start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
            scale = parts[3] if len(parts) == 4 else "log"
            if points < 1:
                raise ValueError("points must be >= 1")
            if scale == "log":
                if start <= 0 or stop <= 0:
                    raise ValueError("log axis needs positive bounds")
                vals = np.geomspace(start, stop, points).tolist()
            elif scale == "lin":
                vals = np.linspace(start, stop, points).tolist()
            else:
                raise ValueError(f"unknown spacing {scale!r}")
        else:
            raise ValueError("expected VALUE or START:STOP:POINTS[:log|lin]")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad axis {text!r}: {exc}") from None
    if any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError(f"axis {text!r} must be strictly positive")
    return vals


def parse_dx(text: str):
    """Separation in metres, ``inf``, or a multiple of the radius such as ``10R``."""
    t = text.strip()
    try:
        if t.lower() in ("inf", "infinity"):
            return math.inf
        if t.endswith("R"):
            return ("R", float(t[:-1] or 1))
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad separation {text!r}") from None


def _global_parser() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    opt = g.add_argument_group("global options")
    opt.add_argument("--catalog", default=_env("CATALOG", "builtin"), help="catalog file or 'builtin'")
    opt.add_argument("--r-model", type=_r_model, default=_env("R_MODEL", "nucleus"), help="nucleus | zpf | fixed:VALUE")
    opt.add_argument("--threshold", type=_positive_float, default=_env("THRESHOLD", "1.0"), help="t_coh/t_GR ratio counted as favorable")
    opt.add_argument("--format", choices=("md", "csv", "json"), default=_env("FORMAT", "md"))
    opt.add_argument("--workers", type=_positive_int, default=_env("WORKERS", "1"))
    opt.add_argument("--seed", type=int, default=_env("SEED", "0"))
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_parser()
    p = argparse.ArgumentParser(prog="grsuper", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    # argparse.SUPPRESS keeps a subcommand default from overwriting a value given before the subcommand
    sub_common = _global_parser()
    for action in sub_common._actions:
        action.default = argparse.SUPPRESS

    ev = sub.add_parser("evaluate", parents=[sub_common], help="evaluate catalog entries")
    sel = ev.add_mutually_exclusive_group(required=True)
    sel.add_argument("--id", action="append", dest="ids", help="entry id (repeatable)")
    sel.add_argument("--all", action="store_true")
    ev.add_argument("--columns", type=_columns, default=DEFAULT_COLUMNS)
    ev.add_argument("--ground-state", action="store_true", help="use 1/(gamma n_th) for states needing n = 0")

    tb = sub.add_parser("table", parents=[sub_common], help="comparison table for a whole catalog")
    tb.add_argument("--columns", type=_columns, default=DEFAULT_COLUMNS)

    sw = sub.add_parser("sweep", parents=[sub_common], help="feasibility over a parameter grid (csv)")
    sw.add_argument("--f-m", type=parse_axis, required=True, help="Hz; VALUE or START:STOP:POINTS[:log|lin]")
    sw.add_argument("--mass", type=parse_axis, required=True, help="kg")
    sw.add_argument("--q", type=parse_axis, required=True, help="quality factor")
    sw.add_argument("--temp", type=parse_axis, default=[0.01], help="K (default 0.01)")
    sw.add_argument("--material", default="Si")
    sw.add_argument("--cap", type=_positive_int, default=1_000_000)
    sw.add_argument("--output", "-o", help="csv path (default: stdout)")

    se = sub.add_parser("selfenergy", parents=[sub_common], help="numerical self-energy difference")
    se.add_argument("--geometry", choices=("sphere", "slab", "lattice"), default="sphere")
    se.add_argument("--dx", type=parse_dx, default=("R", 10.0), help="metres, inf, or kR (default 10R)")
    se.add_argument("--mass", type=_positive_float, help="kg (default: one nucleus)")
    se.add_argument("--radius", type=_positive_float, help="m (default: nuclear radius)")
    se.add_argument("--A", type=_positive_int, default=28, help="mass number")
    se.add_argument("--n-side", type=_positive_int, default=10, help="lattice sites per edge")
    se.add_argument("--samples", type=int, default=1_000_000)
    se.add_argument("--strategy", choices=STRATEGIES, default="plain-MC")
    se.add_argument("--target", type=float, default=0.01, help="target relative error")

    mq = sub.add_parser("min-q", parents=[sub_common], help="minimum quality factor versus frequency")
    mq.add_argument("--f-m", type=parse_axis, nargs="+", required=True)
    mq.add_argument("--temp", type=_positive_float, default=0.01)
    mq.add_argument("--material", default="Si")
    return p


def _load(args):
    try:
        if args.catalog == "builtin":
            return builtin_catalog()
        return load_catalog_file(args.catalog)
    except CatalogError as exc:
        raise DataError(f"catalog error: {exc}") from None
    except OSError as exc:
        raise DataError(f"cannot read catalog {args.catalog!r}: {exc}") from None


def cmd_evaluate(args, out):
    entries = _load(args)
    if args.all:
        chosen = entries
    else:
        by_id = {e.id: e for e in entries}
        missing = [i for i in args.ids if i not in by_id]
        if missing:
            raise DataError(f"unknown entry id(s): {', '.join(missing)}")
        chosen = [by_id[i] for i in args.ids]
    rows = [evaluate(e, args.r_model, args.threshold, ground_state=args.ground_state) for e in chosen]
    out.write(render(rows, RenderSpec(args.format, args.columns)))


def cmd_table(args, out):
    rows = [evaluate(e, args.r_model, args.threshold) for e in _load(args)]
    out.write(render(rows, RenderSpec(args.format, args.columns)))


def cmd_sweep(args, out):
    try:
        rows = sweep(args.f_m, args.mass, args.q, args.temp, args.r_model, args.threshold,
                     args.material, args.workers, args.cap)
    except SweepTooLarge as exc:
        raise DataError(str(exc)) from None
    except ValueError as exc:
        raise DataError(str(exc)) from None
    text = render(rows, RenderSpec("csv", SWEEP_COLUMNS))
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot write {args.output!r}: {exc}") from None
    else:
        out.write(text)
    frac = sum(r.favorable for r in rows) / len(rows)
    print(f"favorable fraction: {frac:.6g} ({sum(r.favorable for r in rows)}/{len(rows)})", file=sys.stderr)


def cmd_selfenergy(args, out):
    from .physics import nucleus_model

    radius = args.radius if args.radius is not None else nucleus_model(args.A).a
    dx = args.dx[1] * radius if isinstance(args.dx, tuple) else args.dx
    try:
        cfg = IntegrationConfig(sample_count=args.samples, seed=args.seed, strategy=args.strategy,
                                target_rel_error=args.target)
        res = superposition_energy(args.geometry, dx, args.mass, args.radius, args.A, args.n_side, cfg, args.workers)
    except ConvergenceError as exc:
        e = exc.estimate
        out.write(f"not converged: {exc}\npartial dE [J]: {e.value!r} +/- {e.error!r}\n")
        raise DataError("integration did not converge") from None
    except IntegrationError as exc:
        raise DataError(str(exc)) from None
    rec = {
        "geometry": res.geometry,
        "dx [m]": res.dx,
        "dE_numeric [J]": res.numeric.value,
        "dE_error [J]": res.numeric.error,
        "dE_analytic [J]": res.analytic,
        "rel_deviation [1]": res.rel_deviation,
        "t_GR_P [s]": res.t_GR_P,
        "samples": res.numeric.samples,
        "truncation_bound [J]": res.numeric.truncation_bound,
    }
    if args.format == "json":
        clean = {k: ("inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in rec.items()}
        out.write(json.dumps(clean, indent=2) + "\n")
    elif args.format == "csv":
        out.write(",".join(rec) + "\n")
        out.write(",".join("" if v is None else (repr(v) if isinstance(v, float) else str(v)) for v in rec.values()) + "\n")
    else:
        for k, v in rec.items():
            out.write(f"{k}: {'n/a' if v is None else v}\n")


def cmd_min_q(args, out):
    freqs = sorted({f for axis in args.f_m for f in axis})
    rows = [(f, min_quality_factor(f, args.temp, args.material), min_quality_factor_bisect(f, args.temp, args.material))
            for f in freqs]
    header = ["f_m [Hz]", "T [K]", "Q_min [1]", "Q_min_bisection [1]"]
    if args.format == "json":
        out.write(json.dumps({"rows": [dict(zip(header, (f, args.temp, a, b))) for f, a, b in rows]}, indent=2) + "\n")
    elif args.format == "csv":
        out.write(",".join(header) + "\n")
        for f, a, b in rows:
            out.write(f"{f!r},{args.temp!r},{a!r},{b!r}\n")
    else:
        out.write("| " + " | ".join(header) + " |\n|---|---|---|---|\n")
        for f, a, b in rows:
            out.write(f"| {f:.3g} | {args.temp:.3g} | {a:.2e} | {b:.2e} |\n")


COMMANDS = {
    "evaluate": cmd_evaluate,
    "table": cmd_table,
    "sweep": cmd_sweep,
    "selfenergy": cmd_selfenergy,
    "min-q": cmd_min_q,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, out)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands
-----------
gml-eval   evaluate the generalized Mittag-Leffler function on a grid of z
simulate   Monte Carlo summaries of the inverse process at several times
solve      spectral solution grid u(t, x) of the self-similar Cauchy problem
verify     run property suites and print a pass/fail table

Exit codes: 0 success, 1 failed verification, 2 unparsable input, 3
configuration or evaluation error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from typing import List, Optional, Sequence

import numpy as np

from .bernstein import parse_spec
from .errors import ConfigError, SSFracError
from .gml import GMLEvaluator

SPEC_HELP = ("Bernstein function as name[:key=value,...]; families: drift:b=<b>, "
             "stable:alpha=<index>, poisson:q=<q>.  A bare 'stable' takes its index from --alpha.")


class ParseError(Exception):
    """Unparsable command-line input (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _grid(text: str) -> np.ndarray:
    """``a,b,c`` or ``start:stop:num`` (inclusive linspace)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b,c or start:stop:num, got {text!r}") from None


def _positive_int(text: str) -> int:
    value = int(float(text))
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _atomic_write(path: Optional[str], text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename; stdout if no path."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _spec(text: str, alpha: float):
    try:
        name = text.split(":", 1)[0].strip().lower()
        if name == "stable" and ":" not in text:
            text = f"stable:alpha={alpha}"
        return parse_spec(text)
    except ConfigError as exc:
        raise ParseError(str(exc)) from exc


# ----------------------------------------------------------------------
# config files
# ----------------------------------------------------------------------
def read_config(path: str) -> List[tuple]:
    """``key=value`` lines; ``#`` starts a comment."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    items = []
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq or not key.strip():
            raise ConfigError(f"{path}:{num}: expected key=value")
        items.append((key.strip().replace("_", "-"), value.strip()))
    return items


def _config_argv(parser: argparse.ArgumentParser, items) -> List[str]:
    options = {}
    for action in parser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                options[opt[2:]] = action
    argv = []
    for key, value in items:
        if key in ("config", "help") or key not in options:
            raise ConfigError(f"unknown config key {key!r}")
        action = options[key]
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(f"--{key}")
            elif value.lower() not in ("0", "false", "no", "off"):
                raise ConfigError(f"expected a boolean for {key!r}")
        else:
            argv.append(f"--{key}={value}")
    return argv


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------
def cmd_gml_eval(args) -> int:
    spec = _spec(args.phi, args.alpha)
    if args.z is None and args.q is None:
        raise ParseError("one of --z or --q is required")
    z = args.z if args.z is not None else 0.0 - args.q
    g = GMLEvaluator(spec, args.alpha, tol=args.tol)
    rows = []
    for zi in z:
        zi = float(zi)
        if args.method == "auto":
            rep = g.eval(zi)
        elif args.method == "series":
            rep = g.eval_series(zi)
        elif zi >= 0:
            raise ConfigError(f"method {args.method} needs z < 0")
        elif args.method == "mellin_barnes":
            rep = g.eval_mellin_barnes(-zi)
        else:
            rep = g.eval_asymptotic(-zi)
        rows.append((zi, float(np.real(rep.value)), rep.method, float(rep.est_error)))
    if args.format == "json":
        text = _json({"phi": spec.to_string(), "alpha": args.alpha, "rows": [
            {"z": r[0], "value": r[1], "method": r[2], "est_error": r[3]} for r in rows]})
    else:
        text = _csv(("z", "value", "method", "est_error"), rows)
    _atomic_write(args.out, text)
    return 0


def cmd_simulate(args) -> int:
    from .stoch import SimConfig, mc_expectation, sample_inverse_exact, sample_inverse_path

    spec = _spec(args.phi, args.alpha)
    cfg = SimConfig(seed=args.seed, n_samples=args.n, dt=args.dt, eps=args.eps,
                    workers=args.workers, delta=args.delta)
    summaries = []
    dumps = []
    for t in args.t:
        t = float(t)
        est = mc_expectation(lambda v: v, spec, args.alpha, t, cfg, sampler=args.sampler)
        summaries.append({"t": t, **est.to_dict()})
        if args.dump:
            sampler = sample_inverse_exact if args.sampler == "exact" else sample_inverse_path
            dumps.append(sampler(spec, args.alpha, t, cfg))
    if args.format == "csv":
        text = _csv(("t", "mean", "std_error", "n", "seed"),
                    [(s["t"], s["mean"], s["std_error"], s["n"], s["seed"]) for s in summaries])
    else:
        text = _json({"phi": spec.to_string(), "alpha": args.alpha, "sampler": args.sampler,
                      "summaries": summaries})
    if args.dump:
        _atomic_write(args.dump, _csv([_fmt(float(t)) for t in args.t], np.column_stack(dumps)))
    _atomic_write(args.out, text)
    return 0


def _initial_datum(text: str, model, N: int):
    from .functions import polynomial
    from .spectral import expand

    kind, _, body = text.partition(":")
    try:
        if kind == "mode":
            k = int(body)
            if k < 0:
                raise ValueError
            c = np.zeros(max(N, k) + 1)
            c[k] = 1.0
            return c
        values = [float(v) for v in body.split(",") if v.strip()]
        if not values:
            raise ValueError
    except ValueError:
        raise ParseError(f"bad initial datum {text!r}") from None
    if kind == "eig":
        return np.array(values)
    if kind == "poly":
        return expand(model, polynomial(values), max(N, len(values) - 1))
    raise ParseError(f"initial datum must be mode:k, poly:c0,c1,... or eig:c0,c1,...; got {text!r}")


def cmd_solve(args) -> int:
    from .spectral import parse_model, solve

    try:
        model = parse_model(args.model, nodes=args.nodes)
    except ConfigError as exc:
        raise ParseError(str(exc)) from exc
    spec = _spec(args.phi, args.alpha)
    coeffs = _initial_datum(args.f, model, args.N)
    g = GMLEvaluator(spec, args.alpha, tol=args.tol)
    t = np.asarray(args.t, dtype=float)
    x = np.asarray(args.x, dtype=float)
    grid = np.atleast_2d(solve(model, g, coeffs, t, x))
    meta = {"model": model.to_string(), "phi": spec.to_string(), "alpha": args.alpha,
            "f": args.f, "N": len(coeffs) - 1, "nodes": model.nodes, "tol": args.tol,
            "t": [float(v) for v in t], "x": [float(v) for v in x]}
    if args.format == "json":
        _atomic_write(args.out, _json({**meta, "u": grid.tolist()}))
        return 0
    text = _csv(["t"] + [_fmt(float(v)) for v in x], [[ti, *row] for ti, row in zip(t, grid)])
    if args.out not in (None, "-"):
        _atomic_write(os.path.splitext(args.out)[0] + ".json", _json(meta))
    _atomic_write(args.out, text)
    return 0


def cmd_verify(args) -> int:
    from .verify import format_table, run_suite

    if args.tol is not None and not args.tol > 0:
        raise ConfigError("--tol must be positive")
    rows = run_suite(args.suite, tol=args.tol, seed=args.seed)
    table = format_table(rows)
    print(table)
    if args.out:
        if args.format == "json":
            _atomic_write(args.out, _json({"suite": args.suite, "seed": args.seed, "checks": [
                {"suite": r.suite, "check": r.name, "residual": r.residual, "tol": r.tol,
                 "passed": r.passed} for r in rows]}))
        else:
            _atomic_write(args.out, _csv(("suite", "check", "residual", "tol", "passed"),
                                         [(r.suite, r.name, r.residual, r.tol, r.passed) for r in rows]))
    return 0 if all(r.passed for r in rows) else 1


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ssfrac", description=__doc__.split("\n\n")[1],
                formatter_class=argparse.RawDescriptionHelpFormatter,
                epilog="Negative values are passed as --z=-1,-2.  Grids accept a,b,c or start:stop:num.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default="csv"):
        sp.add_argument("--config", help="key=value file; command-line flags take precedence")
        sp.add_argument("--out", help="output path (default: standard output)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    def phi(sp):
        sp.add_argument("--phi", required=True, help=SPEC_HELP)
        sp.add_argument("--alpha", type=float, required=True, help="time index in (0, 1]")

    g = sub.add_parser("gml-eval", help="evaluate E(z)")
    phi(g)
    where = g.add_mutually_exclusive_group()
    where.add_argument("--z", type=_grid, help="evaluation points")
    where.add_argument("--q", type=_grid, help="evaluate at z = -q instead")
    g.add_argument("--method", choices=("auto", "series", "mellin_barnes", "asymptotic"), default="auto")
    g.add_argument("--tol", type=float, default=1e-12)
    common(g)
    g.set_defaults(func=cmd_gml_eval)

    s = sub.add_parser("simulate", help="Monte Carlo summaries of zeta_t")
    phi(s)
    s.add_argument("--t", type=_grid, default=np.array([1.0]))
    s.add_argument("--sampler", choices=("exact", "path"), default="exact")
    s.add_argument("--n", type=_positive_int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dt", type=float, default=1e-3, help="path sampler clock step")
    s.add_argument("--eps", type=float, default=1e-4, help="path sampler starting point")
    s.add_argument("--delta", type=float, default=None, help="small-jump cutoff (default: automatic)")
    s.add_argument("--workers", type=_positive_int, default=1)
    s.add_argument("--dump", help="CSV of raw samples, one column per t")
    common(s, "json")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("solve", help="spectral solution grid")
    v.add_argument("--model", required=True,
                   help="laguerre | jacobi:lam1=,mu= | gen_laguerre:m= | gen_jacobi:lam1=,m=")
    phi(v)
    v.add_argument("--f", default="mode:1", help="mode:k | poly:c0,c1,... (monomials) | eig:c0,c1,...")
    v.add_argument("--t", type=_grid, default=np.array([1.0]))
    v.add_argument("--x", type=_grid, default=np.array([0.5]))
    v.add_argument("--N", type=_positive_int, default=32)
    v.add_argument("--nodes", type=_positive_int, default=128)
    v.add_argument("--tol", type=float, default=1e-12)
    common(v)
    v.set_defaults(func=cmd_solve)

    r = sub.add_parser("verify", help="run property suites")
    r.add_argument("--suite", choices=("eigen", "power", "scaling", "biorth", "mc", "cauchy", "all"),
                   default="all")
    r.add_argument("--tol", type=float, default=None, help="override deterministic tolerances")
    r.add_argument("--seed", type=int, default=42)
    common(r)
    r.set_defaults(func=cmd_verify)
    return p


_EXCLUSIVE = {"z": "q", "q": "z"}


def _config_path(argv: Sequence[str]) -> Optional[str]:
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise ParseError("--config needs a path")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _parse(argv: Sequence[str]):
    """Parse flags; a config file's entries are inserted ahead of the
    command-line flags so that the latter win."""
    parser = build_parser()
    path = _config_path(argv)
    subparsers = parser._subparsers._group_actions[0].choices
    if path is not None and argv and argv[0] in subparsers:
        given = {tok[2:].split("=", 1)[0] for tok in argv if tok.startswith("--")}
        given |= {_EXCLUSIVE[k] for k in given if k in _EXCLUSIVE}
        items = [(k, v) for k, v in read_config(path) if k not in given]
        extra = _config_argv(subparsers[argv[0]], items)
        argv = [argv[0], *extra, *argv[1:]]
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        return int(args.func(args))
    except ParseError as exc:
        print(f"ssfrac: error: {exc}", file=sys.stderr)
        return 2
    except (SSFracError, ConfigError, ValueError, ArithmeticError) as exc:
        print(f"ssfrac: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

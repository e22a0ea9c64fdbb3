"""Command-line front end.

Exit codes: 0 when every verdict passes, 1 on a failed verdict, 2 on a usage
or configuration error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import density as dens
from .characters import QuadraticCharacter, l_value
from .ffpoly import IntPoly
from .numfield import parse_field
from .primes import CACHE_ENV, primes_upto, require_prime
from .splitting import split_prime
from .suite import ConfigError, parse_config, run, to_csv, to_json, verify_suite
from .zetaseries import ideal_counts, riemann_extended, zeta_dirichlet, zeta_euler

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _field(text: str | None):
    if not text:
        raise UsageError("--field is required, e.g. --field 'quadratic d=-1'")
    fld, _ = parse_field(text)
    return fld


def _complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) > 2:
        raise UsageError(f"--s expects RE or RE,IM, got {text!r}")
    return complex(float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0)


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_field(args) -> int:
    fld, extra = parse_field(" ".join(args.definition))
    out = fld.describe()
    if extra:
        out["metadata"] = extra
    _emit(to_json(out), args.output)
    return EXIT_OK


def cmd_split(args) -> int:
    K = _field(args.field)
    if args.p:
        primes = [require_prime(int(p)) for p in args.p.split(",")]
    else:
        primes = [int(p) for p in primes_upto(args.upto)]
    lines = [json.dumps(split_prime(K, p, args.seed).to_dict()) for p in primes]
    _emit("".join(line + "\n" for line in lines), args.output)
    return EXIT_OK


def cmd_count_ideals(args) -> int:
    K = _field(args.field)
    tbl = ideal_counts(K, args.bound, args.seed)
    n = np.arange(1, tbl.bound + 1)
    rows = np.stack([n, tbl.j[1:], tbl.cumulative[1:]], axis=1)
    header = "n,j_n,i_n\n"
    body = "\n".join(f"{a},{b},{c}" for a, b, c in rows.tolist())
    _emit(header + body + "\n", args.output)
    if tbl.partial:
        print(f"warning: primes {list(tbl.bad_primes)} not resolved; counts omit them", file=sys.stderr)
    return EXIT_OK


def cmd_zeta(args) -> int:
    s = _complex(args.s)
    if args.method == "extended":
        z = riemann_extended(s)
    elif args.method == "dirichlet":
        z = zeta_dirichlet(ideal_counts(_field(args.field), args.bound, args.seed), s)
    else:
        z = zeta_euler(_field(args.field), s, args.bound, args.seed)
    _emit(to_json(z.to_dict()), args.output)
    return EXIT_OK


def cmd_lvalue(args) -> int:
    lv = l_value(QuadraticCharacter(args.D), args.s, args.terms)
    _emit(to_json(lv.to_dict()), args.output)
    return EXIT_OK


def cmd_density(args) -> int:
    kw = {"chunks": args.workers, "workers": args.workers}
    if args.tolerance is not None:
        kw["tolerance"] = args.tolerance
    exp = args.experiment
    if exp == "thm3":
        rep = dens.experiment_thm3(_field(args.field), args.X, **kw)
    elif exp in ("cor1", "cor2"):
        if args.poly:
            f = IntPoly.parse(args.poly)
        elif args.field:
            f = _field(args.field).defining_poly
        else:
            raise UsageError(f"{exp} needs --poly or --field")
        if args.degree is None:
            raise UsageError(f"{exp} needs --degree (normal closure or splitting field degree)")
        runner = dens.experiment_cor1 if exp == "cor1" else dens.experiment_cor2
        rep = runner(f, args.degree, args.X, **kw)
    else:
        if args.m is None:
            raise UsageError("cor3 needs --m")
        gens = [int(g) for g in args.H.split(",") if g] if args.H else []
        rep = dens.experiment_cor3(args.m, gens, args.X, **kw)
    _emit(to_json(rep.to_dict()), args.output)
    if args.csv:
        rows = [{"X": x, "empirical": e} for x, e in rep.checkpoints]
        Path(args.csv).write_text(to_csv(rows, ["X", "empirical"]))
    return EXIT_OK if rep.verdict else EXIT_FAIL


def _write_metadata(path: str | None, started: float, extra: dict) -> None:
    if not path:
        return
    meta = {
        "started": dt.datetime.fromtimestamp(started, dt.timezone.utc).isoformat(),
        "elapsed_seconds": round(time.time() - started, 3),
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        **extra,
    }
    Path(path).write_text(json.dumps(meta, indent=2) + "\n")


def _emit_suite(result, fmt: str, path: str | None) -> None:
    _emit(result.to_csv() if fmt == "csv" else result.to_json(), path)


def cmd_verify(args) -> int:
    started = time.time()
    result = verify_suite(workers=args.workers, seed=args.seed)
    _emit_suite(result, args.format, args.output)
    _write_metadata(args.metadata, started, {"workers": args.workers, "seed": args.seed})
    return result.exit_code


def cmd_run(args) -> int:
    started = time.time()
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    cfg = parse_config(text)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.format is not None:
        cfg.output_format = args.format
    if cfg.cache_dir and not os.environ.get(CACHE_ENV):
        os.environ[CACHE_ENV] = cfg.cache_dir
    result = run(cfg)
    _emit_suite(result, cfg.output_format, args.output)
    _write_metadata(args.metadata, started, {"config": args.config, "seed": cfg.seed})
    return result.exit_code


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dedekind", description="Zeta functions and split-prime densities of number fields.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--cache-dir", help=f"prime cache directory (default: ${CACHE_ENV} or ~/.cache/dedekind)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        return p

    p = add("field", cmd_field, "describe a number field")
    p.add_argument("definition", nargs="+", help="e.g. quadratic d=-1 | cyclotomic m=5 | poly f='x^3-2'")

    p = add("split", cmd_split, "splitting types of primes, one JSON record per line")
    p.add_argument("--field", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", help="comma-separated primes")
    g.add_argument("--upto", type=_bound, help="all primes up to this bound")
    p.add_argument("--seed", type=int, default=0)

    p = add("count-ideals", cmd_count_ideals, "CSV of ideal counts n, j_n, i_n")
    p.add_argument("--field", required=True)
    p.add_argument("--bound", type=_bound, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("zeta", cmd_zeta, "evaluate a zeta function")
    p.add_argument("--s", required=True, help="RE or RE,IM")
    p.add_argument("--method", choices=["dirichlet", "euler", "extended"], default="dirichlet")
    p.add_argument("--field", help="required for dirichlet and euler")
    p.add_argument("--bound", type=_bound, default=10**5, help="table bound B or prime bound P")
    p.add_argument("--seed", type=int, default=0)

    p = add("lvalue", cmd_lvalue, "L(s, chi_D) for a quadratic character")
    p.add_argument("--D", type=int, required=True, help="fundamental discriminant")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--terms", type=int, help="number of terms (default from a 1e-10 tail target)")

    p = add("density", cmd_density, "natural density of a set of split primes")
    p.add_argument("--experiment", choices=["thm3", "cor1", "cor2", "cor3"], required=True)
    p.add_argument("--X", type=_bound, default=10**6)
    p.add_argument("--field")
    p.add_argument("--poly")
    p.add_argument("--degree", type=int, help="normal closure / splitting field degree")
    p.add_argument("--m", type=int)
    p.add_argument("--H", help="comma-separated generators of the subgroup")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", help="write (X, empirical) checkpoints here")

    p = add("verify", cmd_verify, "run the pinned verification battery")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--metadata", help="write timestamps and versions here")

    p = add("run", cmd_run, "run the experiments listed in a config file")
    p.add_argument("config")
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--metadata")
    return ap


def _bound(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v != int(v) or not 1 <= v <= 10**7:
        raise argparse.ArgumentTypeError(f"bound must be an integer in [1, 1e7], got {text}")
    return int(v)


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.cache_dir:
        os.environ[CACHE_ENV] = args.cache_dir
    try:
        return args.func(args)
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

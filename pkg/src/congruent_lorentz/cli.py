"""Command-line entry point: dist, freepath, sweep, billiard, verify.

Exit codes: 0 success, 2 usage or configuration error, 3 internal
consistency failure (engine disagreement or a failed verify check).
Any flag may also be set through an environment variable
CONGRUENT_LORENTZ_<FLAG>, e.g. CONGRUENT_LORENTZ_WORKERS=4; explicit
flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path


from . import __version__, billiards, freepath, limitdist, plotting, sweep, verify

ENV_PREFIX = "CONGRUENT_LORENTZ_"
EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 2, 3


class UsageError(Exception):
    pass


def _env_default(name, fallback, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"bad value {raw!r} for {ENV_PREFIX}{name.upper()}") from None


def _grid(spec):
    try:
        return sweep.parse_grid(spec)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _sidecar_path(csv_path, json_path):
    if json_path:
        return json_path
    if csv_path and csv_path != "-":
        return str(Path(csv_path).with_suffix(".json"))
    return None


# --- subcommands ------------------------------------------------------------------

def cmd_dist(args):
    lambdas = _grid(args.grid)
    curve = limitdist.LimitCurve.on_grid(args.ell, lambdas)
    _write(curve.to_csv(), args.out)
    if args.svg:
        plotting.plot_limit(curve, args.svg)
    return EXIT_OK


def _same(a, b):
    if a.hit != b.hit:
        return False
    if a.escaped or b.escaped:
        return a.escaped == b.escaped
    return abs(a.outcome - b.outcome) <= 1e-9 * max(1.0, a.outcome)


def cmd_freepath(args):
    if (args.omega is None) == (args.slope is None):
        raise UsageError("give exactly one of --omega or --slope")
    if args.slope is not None:
        engine = args.engine or "farey"
        if engine == "disc":
            raise UsageError("the disc engine takes --omega")
        if not 0.0 <= args.slope <= 1.0:
            raise UsageError("--slope must lie in [0, 1]")
        cfg = freepath.LatticeConfig(args.ell, args.eps, "segment")
        q_max = int(args.lambda_max * cfg.Q)
        engines = {
            "farey": lambda: freepath.horizontal_free_path_farey(cfg, args.slope, args.lambda_max),
            "brute": lambda: freepath.horizontal_free_path_brute(cfg, args.slope, q_max),
        }
    else:
        engine = args.engine or "disc"
        cfg = freepath.LatticeConfig(args.ell, args.eps, "disc")
        engines = {
            "disc": lambda: freepath.exit_time_disc(cfg, args.omega, args.lambda_max),
            "brute": lambda: freepath.exit_time_disc_march(cfg, args.omega, args.lambda_max),
        }
        engines["farey"] = engines["disc"]
    if engine != "both":
        print(engines[engine]().to_json())
        return EXIT_OK
    first, second = ("farey", "brute") if args.slope is not None else ("disc", "brute")
    a, b = engines[first](), engines[second]()
    match = _same(a, b)
    out = json.loads(a.to_json())
    out["engines"] = {first: json.loads(a.to_json()), second: json.loads(b.to_json())}
    out["match"] = match
    print(json.dumps(out))
    return EXIT_OK if match else EXIT_MISMATCH


def _check_run(args):
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")


def _eps_list(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --eps list {text!r}") from None
    if not vals or any(not 0.0 < e < 0.5 for e in vals):
        raise UsageError("every eps must lie in (0, 1/2)")
    return vals


def cmd_sweep(args):
    _check_run(args)
    lambdas = _grid(args.grid)
    eps_list = _eps_list(args.eps)
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    summary = {"ell": args.ell, "n_samples": args.samples, "seed": args.seed, "runs": []}
    tables = []
    for eps in eps_list:
        cfg = freepath.LatticeConfig(args.ell, eps)
        t0 = time.perf_counter()
        table = freepath.empirical_P(cfg, lambdas, args.samples, args.seed, args.workers,
                                     args.lambda_max)
        runtime = time.perf_counter() - t0
        tables.append((eps, table))
        side = table.sidecar(runtime_seconds=runtime)
        summary["runs"].append({"epsilon": eps, "sup_error": table.sup_error})
        if out_dir:
            stem = f"sweep_ell{args.ell}_eps{eps:g}"
            (out_dir / f"{stem}.csv").write_text(table.to_csv())
            _write_json(side, out_dir / f"{stem}.json")
        elif len(eps_list) == 1:
            sys.stdout.write(table.to_csv())
    if args.json:
        _write_json(summary, args.json)
    if out_dir or len(eps_list) > 1:
        print(json.dumps(summary))
    if args.svg:
        plotting.plot_sweep(tables, args.svg, f"ell={args.ell}")
    return EXIT_OK


def cmd_billiard(args):
    _check_run(args)
    lambdas = _grid(args.grid)
    eps = _eps_list(args.eps)
    if len(eps) != 1 or not eps[0] < 0.25:
        raise UsageError("billiard takes a single pocket radius in (0, 1/4)")
    run = billiards.empirical_P_hex if args.table == "hex" else billiards.empirical_P_square
    t0 = time.perf_counter()
    table = run(eps[0], lambdas, args.samples, args.seed, args.workers, args.lambda_max)
    side = table.sidecar(runtime_seconds=time.perf_counter() - t0)
    _write(table.to_csv(), args.out)
    js = _sidecar_path(args.out, args.json)
    if js:
        _write_json(side, js)
    else:
        print(json.dumps(side), file=sys.stderr)
    if args.svg:
        theory = "G3(2l/sqrt3)" if args.table == "hex" else "G2(l/sqrt2)"
        plotting.plot_distribution(table, args.svg, f"{args.table}, eps={eps[0]:g}, vs {theory}")
    return EXIT_OK


def cmd_verify(args):
    if args.suite not in verify.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(verify.SUITES)}")
    rows = []
    failed = 0
    for check in verify.run_suite(args.suite, Q=args.Q, rows=rows):
        print(check.line(), flush=True)
        failed += not check.passed
    if rows:
        print(verify.SUM_HEADER)
        print("\n".join(rows))
    print(f"{'all passed' if not failed else f'{failed} failed'}")
    return EXIT_OK if not failed else EXIT_MISMATCH


# --- parser ------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="congruent-lorentz", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps=True, grid=True, run=False):
        sp.add_argument("--ell", type=int, default=_env_default("ell", 3, int))
        if eps:
            sp.add_argument("--eps", default=_env_default("eps", "0.001"))
        if grid:
            sp.add_argument("--grid", default=_env_default("grid", "0.01:5:200"),
                            help="min:max:count[:log]")
        sp.add_argument("--out", default=_env_default("out", None))
        sp.add_argument("--svg", default=_env_default("svg", None))
        if run:
            sp.add_argument("--samples", type=int, default=_env_default("samples", 200_000, int))
            sp.add_argument("--seed", type=int,
                            default=_env_default("seed", sweep.DEFAULT_SEED, int))
            sp.add_argument("--workers", type=int, default=_env_default("workers", 1, int))
            sp.add_argument("--json", default=_env_default("json", None))
            sp.add_argument("--lambda-max", type=float, default=None,
                            help="escape horizon for eps*tau (default 4x grid max)")

    d = sub.add_parser("dist", help="tabulate G and g")
    common(d, eps=False)
    d.set_defaults(func=cmd_dist)

    f = sub.add_parser("freepath", help="one free path")
    f.add_argument("--ell", type=int, default=_env_default("ell", 3, int))
    f.add_argument("--eps", type=float, default=_env_default("eps", 0.001, float))
    f.add_argument("--omega", type=float)
    f.add_argument("--slope", type=float)
    f.add_argument("--engine", choices=("farey", "brute", "disc", "both"))
    f.add_argument("--lambda-max", type=float, default=freepath.DEFAULT_LAMBDA_MAX)
    f.set_defaults(func=cmd_freepath)

    s = sub.add_parser("sweep", help="empirical P against G_ell for a list of eps")
    common(s, run=True)
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("billiard", help="hexagon or square with corner pockets")
    common(b, run=True)
    b.add_argument("--table", choices=billiards.SHAPES, default=_env_default("table", "hex"))
    b.set_defaults(func=cmd_billiard)

    v = sub.add_parser("verify", help="run a self-check suite")
    v.add_argument("suite", nargs="?", default="all")
    v.add_argument("--Q", type=int, default=_env_default("q", 2000, int))
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""``chiplet-lce`` command line: eval, sweep and pareto.

Exit codes: 0 success, 1 configuration error, 2 runtime error,
3 empty feasible set (pareto only).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import report
from .config import ConfigError, load_config
from .explorer import InfeasibleError, SweepAxis, load_space, pareto_min_lce, sweep
from .metrics import EvaluationError, evaluate

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_INFEASIBLE = 0, 1, 2, 3
THREADS_ENV = "CHIPLET_LCE_THREADS"


def parse_value(token: str):
    """Axis value: JSON scalar if it parses (``3``, ``0.5``, ``true``), else the raw string."""
    try:
        value = json.loads(token)
    except json.JSONDecodeError:
        return token
    if isinstance(value, (list, dict)):
        raise ConfigError("axis", f"axis values must be scalars, got {token!r}")
    return value


def parse_axis(text: str) -> SweepAxis:
    name, sep, values = text.partition("=")
    if not sep or not name.strip() or not values.strip():
        raise ConfigError("axis", f"expected NAME=v1,v2,... got {text!r}")
    return SweepAxis(name.strip(), tuple(parse_value(v.strip()) for v in values.split(",")))


def _threads(arg: int | None) -> int:
    if arg is not None:
        n = arg
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(THREADS_ENV, f"expected an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("threads", f"must be >= 1, got {n}")
    return n


def _config(args):
    cfg = load_config(args.config or args.config_pos)
    if args.seed is not None:
        cfg = cfg.replace("sim.rng_seed", args.seed)
    if args.iterations is not None:
        cfg = cfg.replace("sim.mc_iterations", args.iterations)
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.parent != Path("."):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_eval(args) -> int:
    result = evaluate(_config(args))
    text = report.result_csv(result) if args.format == "csv" else report.result_json(result)
    _emit(text, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    axes = load_space(args.space) if args.space else []
    axes += [parse_axis(a) for a in args.axis]
    if not axes:
        raise ConfigError("axis", "sweep needs --axis or --space")
    points = sweep(cfg, axes, threads=_threads(args.threads))
    text = report.sweep_json(points) if args.format == "json" else report.sweep_csv(points)
    _emit(text, args.out)
    return EXIT_OK


def cmd_pareto(args) -> int:
    cfg = _config(args)
    space = load_space(args.space)
    if args.capacity < 0:
        raise ConfigError("capacity", f"must be >= 0, got {args.capacity}")
    result = pareto_min_lce(cfg, space, args.capacity, threads=_threads(args.threads))
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    _emit(report.frontier_csv(result), str(out / "frontier.csv"))
    _emit(report.best_json(result.best), str(out / "best.json"))
    b = result.best
    print(f"best: index {b.index} {b.deltas} lce={report.fmt(b.lce)}; "
          f"{len(result.frontier)} frontier points", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config_pos", nargs="?", metavar="CONFIG",
                        help="configuration JSON (default: bundled 14nm profile)")
    common.add_argument("--config", help="configuration JSON, same as the positional")
    common.add_argument("--seed", type=int, help="override sim.rng_seed")
    common.add_argument("--iterations", type=int, help="override sim.mc_iterations")
    common.add_argument("--out", help="output file (eval, sweep) or directory (pareto)")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--threads", type=int,
                        help=f"worker processes for sweeps (default: ${THREADS_ENV} or 1)")

    parser = argparse.ArgumentParser(prog="chiplet-lce", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one configuration")
    p.set_defaults(func=cmd_eval, default_format="json")

    p = sub.add_parser("sweep", parents=[common], help="grid sweep, one CSV row per point")
    p.add_argument("--axis", action="append", default=[], metavar="NAME=V1,V2,...",
                   help="config field and its values; repeat for a cross product")
    p.add_argument("--space", help="JSON file with axes, placed before any --axis")
    p.set_defaults(func=cmd_sweep, default_format="csv")

    p = sub.add_parser("pareto", parents=[common], help="minimum-LCE search under a capacity floor")
    p.add_argument("--space", required=True, help="JSON file with the search axes")
    p.add_argument("--capacity", type=float, default=0.0,
                   help="minimum active-core transistor count")
    p.set_defaults(func=cmd_pareto, default_format="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"chiplet-lce: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as err:
        print(f"chiplet-lce: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (EvaluationError, ArithmeticError, ValueError, OSError) as err:
        print(f"chiplet-lce: runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``solve``, ``hard-instance`` and ``bench``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .bench import CONFIG_KEYS, METHODS, RunConfig, execute, execute_grid, load_config
from .errors import PerseusError
from .problems import PROBLEMS, HardInstanceSpec, validate_hard_instance


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    return key.strip(), val.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perseus-vi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one method on one problem")
    solve.add_argument("--problem", required=True, choices=sorted(PROBLEMS))
    solve.add_argument("--param", action="append", type=_param, default=[], metavar="K=V")
    solve.add_argument("--method", default="perseus", choices=METHODS)
    solve.add_argument("--p", type=int, default=1)
    solve.add_argument("--L", type=float, default=None)
    solve.add_argument("--T", type=int, default=100)
    solve.add_argument("--opt", type=int, default=0, choices=(0, 1, 2))
    solve.add_argument("--out", default="results")
    solve.add_argument("--sigma", type=float, default=None)
    solve.add_argument("--D", type=float, default=None)
    solve.add_argument("--step", type=float, default=None)
    solve.add_argument("--stop-residue", type=float, default=None)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--no-checks", action="store_true")
    solve.add_argument("--inject-lambda-scale", type=float, default=None, help=argparse.SUPPRESS)

    hard = sub.add_parser("hard-instance", help="describe and validate the lower-bound instance")
    hard.add_argument("--p", type=int, default=2)
    hard.add_argument("--T", type=int, default=1)
    hard.add_argument("--L", type=float, default=1.0)
    hard.add_argument("--validate", action="store_true")

    bench = sub.add_parser("bench", help="run a config file",
                           epilog="keys: " + ", ".join(sorted(CONFIG_KEYS)) + ", param.<name>")
    bench.add_argument("--config", required=True)
    return parser


def _cmd_solve(args) -> int:
    cfg = RunConfig(problem=args.problem, method=args.method, params=dict(args.param), p=args.p,
                    L=args.L, T=args.T, opt=args.opt, out=args.out, checks=not args.no_checks,
                    seed=args.seed, sigma=args.sigma, D=args.D, step=args.step,
                    stop_residue=args.stop_residue, inject_lambda_scale=args.inject_lambda_scale)
    outcome = execute(cfg)
    print(json.dumps(outcome.summary, indent=2))
    return outcome.exit_code


def _cmd_hard(args) -> int:
    spec = HardInstanceSpec(args.p, args.T, args.L)
    info = {"p": spec.p, "T": spec.T, "L": spec.L, "dim": 2 * spec.dim}
    code = 0
    if args.validate:
        rep = validate_hard_instance(spec)
        info.update(F_star_inf_norm=rep.F_star_inf_norm, value_error=rep.value_error,
                    optimal_value=rep.optimal_value, smoothness_estimate=rep.smoothness_estimate,
                    monotone_min=rep.monotone_min, restricted_value=rep.restricted_value,
                    restricted_grid_value=rep.restricted_grid_value, passed=rep.passed)
        code = 0 if rep.passed else 1
    print(json.dumps(info, indent=2))
    return code


def _cmd_bench(args) -> int:
    cfg = load_config(args.config)
    outcomes, fit = execute_grid(cfg)
    for o in outcomes:
        print(f"T={o.config.T} status={o.summary['status']} exit={o.exit_code} "
              f"gap={o.summary['output_metric_gap']} residue={o.summary['output_metric_residue']:.3e}")
    if fit is not None:
        print(f"rate fit ({cfg.metric}): slope={fit.slope:.4f} r2={fit.r_squared:.4f}")
    return max(o.exit_code for o in outcomes)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"solve": _cmd_solve, "hard-instance": _cmd_hard, "bench": _cmd_bench}
    try:
        return handlers[args.command](args)
    except PerseusError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

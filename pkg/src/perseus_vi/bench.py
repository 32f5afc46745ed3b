"""Benchmark harness: run configuration, trace/summary writers and rate fitting.

A run is one (problem, method, T) cell. Its trace goes to ``<stem>.csv`` and its
summary to ``<stem>.json`` in the output directory. A grid over several T also
writes ``rate_fit.json``.

Config files are INI text with a single ``[run]`` section::

    [run]
    problem = bilinear
    param.rho = 1.0
    method = perseus
    p = 1
    T = 25, 100, 400
    out = results

Keys are listed in :data:`CONFIG_KEYS`; anything else is rejected.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .baselines import BaselineConfig, dual_extrapolation_run, extragradient_run
from .checks import run_checks
from .core import ToleranceSet, VIProblem
from .errors import (ConfigParseError, InsufficientPoints, NonpositiveValue, SubsolverFailure,
                     UnknownMethod, UnknownProblem)
from .metrics import dist_to_solution, gap, has_exact_gap, residue
from .problems import PROBLEMS, build_problem
from .solver import SolveResult, SolverConfig, perseus_restart_run, perseus_run

__all__ = [
    "METHODS",
    "TRACE_COLUMNS",
    "CONFIG_KEYS",
    "RunConfig",
    "RunOutcome",
    "RateFit",
    "rate_fit",
    "load_config",
    "execute",
    "execute_grid",
]

METHODS = ("perseus", "perseus-restart", "eg", "de")
TRACE_COLUMNS = ("k", "lambda", "r", "inner_iters", "sub_residue", "sub_threshold",
                 "residue", "gap", "dist_to_xstar", "wall_ns")
SUMMARY_CHECKS = ("lemma1", "lemma2a", "lemma2b", "lemma3", "bracket")
# checks that are computed and gate the exit code but are not part of the fixed summary keys
EXTRA_CHECKS = ("telescoping", "certificates")

CONFIG_KEYS = {
    "problem": "registered problem name",
    "method": "perseus | perseus-restart | eg | de",
    "p": "order (default 1; baselines ignore it)",
    "L": "smoothness constant (default: the problem's constant for order p)",
    "T": "iterations (epochs for perseus-restart); a comma list runs a grid",
    "opt": "output rule 0 | 1 | 2 (default 0)",
    "out": "output directory (default results)",
    "checks": "run lemma checks and fail on violations (default true)",
    "seed": "seed for sampled check points (default 0)",
    "sigma": "restart modulus (default: the problem's regularity modulus)",
    "D": "restart diameter (default: the feasible set's diameter)",
    "step": "baseline step size (default 1/L)",
    "stop_residue": "absolute residue stop level",
    "metric": "metric fitted over a T grid: gap | residue (default gap)",
    "inject_lambda_scale": "test hook: multiply every lambda by this factor",
}


@dataclass
class RunConfig:
    problem: str
    method: str = "perseus"
    params: Dict[str, str] = field(default_factory=dict)
    p: int = 1
    L: Optional[float] = None
    T: int = 100
    opt: int = 0
    out: Path = Path("results")
    checks: bool = True
    seed: int = 0
    sigma: Optional[float] = None
    D: Optional[float] = None
    step: Optional[float] = None
    stop_residue: Optional[float] = None
    metric: str = "gap"
    inject_lambda_scale: Optional[float] = None
    T_grid: Sequence[int] = ()

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise UnknownProblem(f"unknown problem {self.problem!r}")
        if self.method not in METHODS:
            raise UnknownMethod(f"unknown method {self.method!r}; known: {', '.join(METHODS)}")
        if self.metric not in ("gap", "residue"):
            raise ConfigParseError(f"metric must be gap or residue, got {self.metric!r}")
        self.out = Path(self.out)

    def with_T(self, T: int) -> "RunConfig":
        return replace(self, T=T, T_grid=())


@dataclass
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple


def rate_fit(Ts: Sequence[float], values: Sequence[float]) -> RateFit:
    """Least-squares line through ``(log T, log value)``."""
    Ts = np.asarray(Ts, dtype=float)
    vals = np.asarray(values, dtype=float)
    if Ts.size != vals.size:
        raise ValueError("T and value series differ in length")
    if Ts.size < 4:
        raise InsufficientPoints(f"rate fit needs at least 4 points, got {Ts.size}")
    if np.any(vals <= 0) or np.any(Ts <= 0):
        raise NonpositiveValue("rate fit needs positive T and values")
    fit = stats.linregress(np.log(Ts), np.log(vals))
    return RateFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2),
                   (float(Ts.min()), float(Ts.max())))


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep the case of keys such as L and T
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigParseError(f"cannot read config {path}: {exc}") from exc
    if parser.sections() != ["run"]:
        raise ConfigParseError(f"config must contain exactly one [run] section, got {parser.sections()}")
    raw = dict(parser["run"])
    params = {k[len("param."):]: v for k, v in raw.items() if k.startswith("param.")}
    kw = {k: v for k, v in raw.items() if not k.startswith("param.")}
    unknown = sorted(set(kw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigParseError(f"unknown config keys: {', '.join(unknown)}")
    if "problem" not in kw:
        raise ConfigParseError("config is missing 'problem'")
    try:
        Ts = [int(t) for t in kw.pop("T", "100").split(",")]
        conv = {"p": int, "opt": int, "seed": int, "L": float, "sigma": float, "D": float,
                "step": float, "stop_residue": float, "inject_lambda_scale": float}
        for key, fn in conv.items():
            if key in kw:
                kw[key] = fn(kw[key])
        if "checks" in kw:
            kw["checks"] = _BOOL[kw["checks"].strip().lower()]
    except (ValueError, KeyError) as exc:
        raise ConfigParseError(f"bad value in config: {exc}") from exc
    return RunConfig(params=params, T=Ts[0], T_grid=Ts if len(Ts) > 1 else (), **kw)


@dataclass
class RunOutcome:
    config: RunConfig
    problem: VIProblem
    result: SolveResult
    checks: Dict[str, Optional[bool]]
    summary: dict
    exit_code: int
    trace_path: Optional[Path] = None
    summary_path: Optional[Path] = None


def _solve(problem: VIProblem, cfg: RunConfig, L: float, tol: ToleranceSet) -> SolveResult:
    hook = None
    if cfg.inject_lambda_scale is not None:
        scale = cfg.inject_lambda_scale
        hook = lambda k, lam: lam * scale  # noqa: E731
    if cfg.method == "perseus":
        return perseus_run(problem, SolverConfig(cfg.p, L, cfg.T, cfg.opt, tol, lambda_hook=hook))
    if cfg.method == "perseus-restart":
        sigma = cfg.sigma if cfg.sigma is not None else problem.regularity.modulus
        D = cfg.D if cfg.D is not None else problem.set.diameter
        return perseus_restart_run(problem, cfg.p, L, sigma, D, cfg.T, cfg.opt, tol, lambda_hook=hook)
    step = cfg.step if cfg.step is not None else 1.0 / L
    method = "extragradient" if cfg.method == "eg" else "dual_extrapolation"
    runner = extragradient_run if cfg.method == "eg" else dual_extrapolation_run
    return runner(problem, BaselineConfig(method, step, cfg.T, tol))


def _fmt(val) -> str:
    if val is None:
        return ""
    if isinstance(val, float):
        return repr(val)
    return str(val)


def _trace_rows(problem: VIProblem, result: SolveResult, membership: float) -> List[list]:
    exact_gap = has_exact_gap(problem)
    rows = []
    for i, rec in enumerate(result.trace, start=1):
        cert = rec.certificate
        if rec.x is not None:
            res = rec.residue if rec.residue is not None else residue(problem, rec.x, membership)
            g = gap(problem, rec.x) if exact_gap else None
            dist = dist_to_solution(problem, rec.x)
        else:
            res, g, dist = rec.residue, None, None
        rows.append([i, rec.lam, rec.r,
                     cert.inner_iterations if cert else None,
                     cert.model_residue if cert else None,
                     cert.threshold if cert else None,
                     res, g, dist, rec.wall_ns])
    return rows


def _stem(cfg: RunConfig) -> str:
    return f"{cfg.problem}_{cfg.method}_p{cfg.p}_T{cfg.T}"


def execute(cfg: RunConfig, write: bool = True) -> RunOutcome:
    """Run one cell, write its artifacts and decide the exit code.

    Exit codes: 0 success, 1 an enabled check failed, 2 the subsolver failed.
    """
    tol = ToleranceSet() if cfg.stop_residue is None else ToleranceSet(stop_residue=cfg.stop_residue)
    problem = build_problem(cfg.problem, cfg.params)
    p_for_L = 1 if cfg.method in ("eg", "de") else cfg.p
    L = cfg.L if cfg.L is not None else problem.oracle.lipschitz_L(p_for_L)
    exit_code = 0
    try:
        result = _solve(problem, cfg, L, tol)
    except SubsolverFailure as exc:
        result = exc.partial
        exit_code = 2
    checks: Dict[str, Optional[bool]] = {name: None for name in SUMMARY_CHECKS}
    extra: Dict[str, Optional[bool]] = {}
    if cfg.checks and cfg.method.startswith("perseus") and result.trace:
        found = run_checks(problem, result, rng=np.random.default_rng(cfg.seed), tolerances=tol)
        for name in SUMMARY_CHECKS:
            if name in found:
                checks[name] = bool(found[name].holds)
        for name in EXTRA_CHECKS:
            if name in found:
                extra[name] = bool(found[name].holds)
        if exit_code == 0 and any(v is False for v in list(checks.values()) + list(extra.values())):
            exit_code = 1

    out_gap = gap(problem, result.output) if has_exact_gap(problem) else None
    summary = {
        "problem": cfg.problem,
        "method": cfg.method,
        "p": cfg.p,
        "L": L,
        "T": cfg.T,
        "opt": cfg.opt,
        "status": result.status,
        "output_metric_residue": residue(problem, result.output, tol.membership),
        "output_metric_gap": out_gap,
        "sum_lambda": float(sum(rec.lam for rec in result.trace)),
        "lemma_checks": checks,
        "other_checks": extra,
        "iterations": len(result.trace),
        "params": dict(cfg.params),
        "message": result.message,
    }
    outcome = RunOutcome(cfg, problem, result, checks, summary, exit_code)
    if write:
        cfg.out.mkdir(parents=True, exist_ok=True)
        outcome.trace_path = cfg.out / f"{_stem(cfg)}.csv"
        outcome.summary_path = cfg.out / f"{_stem(cfg)}.json"
        with open(outcome.trace_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_COLUMNS)
            for row in _trace_rows(problem, result, tol.membership):
                w.writerow([_fmt(v) for v in row])
        with open(outcome.summary_path, "w") as fh:
            json.dump(summary, fh, indent=2)
    return outcome


def execute_grid(cfg: RunConfig, write: bool = True):
    """Run every T of ``cfg.T_grid`` and fit the chosen metric against T.

    Returns ``(outcomes, fit)``; ``fit`` is None when the grid has fewer than
    four points or a metric value is not positive.
    """
    Ts = list(cfg.T_grid) if cfg.T_grid else [cfg.T]
    outcomes = [execute(cfg.with_T(T), write) for T in Ts]
    key = "output_metric_gap" if cfg.metric == "gap" else "output_metric_residue"
    values = [o.summary[key] for o in outcomes]
    fit, reason = None, ""
    if any(v is None for v in values):
        reason = f"{cfg.metric} unavailable for this problem"
    else:
        try:
            fit = rate_fit(Ts, values)
        except (InsufficientPoints, NonpositiveValue) as exc:
            reason = str(exc)
    if write and len(Ts) > 1:
        cfg.out.mkdir(parents=True, exist_ok=True)
        payload = {"metric": cfg.metric, "T": Ts, "values": values,
                   "fit": None if fit is None else {"slope": fit.slope, "intercept": fit.intercept,
                                                    "r_squared": fit.r_squared, "window": list(fit.window)},
                   "reason": reason}
        with open(cfg.out / "rate_fit.json", "w") as fh:
            json.dump(payload, fh, indent=2, default=lambda v: None if v is None or math.isnan(v) else v)
    return outcomes, fit

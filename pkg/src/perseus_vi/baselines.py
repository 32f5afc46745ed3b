"""First-order reference methods: extragradient and Nesterov's dual extrapolation."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List

import numpy as np

from .core import ToleranceSet, VIProblem, as_vector
from .errors import NotInSet
from .solver import IterationRecord, SolveResult, Status, dual_prox

__all__ = ["BaselineConfig", "extragradient_run", "dual_extrapolation_run", "BASELINES"]


@dataclass
class BaselineConfig:
    method: str
    step: float
    iterations: int
    tolerances: ToleranceSet = ToleranceSet()

    def __post_init__(self):
        if self.method not in BASELINES:
            raise ValueError(f"unknown baseline {self.method!r}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def _start(problem: VIProblem, config: BaselineConfig, x0):
    x0 = problem.default_x0() if x0 is None else as_vector(x0, problem.dim)
    if not problem.set.contains(x0, config.tolerances.membership):
        raise NotInSet("x0 must lie in the feasible set")
    return x0


def _result(problem, config, x0, out, trace, s) -> SolveResult:
    return SolveResult(out, trace, Status.ITERATIONS_EXHAUSTED, x0, s, order_p=1,
                       lipschitz_L=1.0 / config.step, opt=0, r_min=0.0,
                       sum_lambda=float(sum(r.lam for r in trace)), message=config.method)


def extragradient_run(problem: VIProblem, config: BaselineConfig, x0=None) -> SolveResult:
    """Projected extragradient with a constant step; outputs the average of the midpoints.

    ``x_half = P(x - eta F(x))``, ``x_next = P(x - eta F(x_half))``.
    """
    X, eta = problem.set, config.step
    x0 = _start(problem, config, x0)
    x = x0
    keep = problem.dim <= config.tolerances.trace_vector_max_dim
    trace: List[IterationRecord] = []
    acc = np.zeros(problem.dim)
    for k in range(1, config.iterations + 1):
        t0 = time.perf_counter_ns()
        half = X.project(x - eta * problem.F(x))
        F_half = problem.F(half)
        x_next = X.project(x - eta * F_half)
        acc += half
        trace.append(IterationRecord(k, eta, float(np.linalg.norm(half - x)), None,
                                     time.perf_counter_ns() - t0,
                                     x=half if keep else None, v=x if keep else None,
                                     Fx=F_half if keep else None))
        x = x_next
    out = acc / config.iterations
    return _result(problem, config, x0, out, trace, np.zeros(problem.dim))


def dual_extrapolation_run(problem: VIProblem, config: BaselineConfig, x0=None) -> SolveResult:
    """Dual extrapolation with ``beta = 1 / step`` and unit dual weights.

    ``v_k = P(x0 + s_{k-1} / beta)``, ``x_k = P(v_k - F(v_k) / beta)`` (the
    projection form of the regularized linearized VI), ``s_k = s_{k-1} - F(x_k)``.
    The output averages ``x_0, ..., x_T``.
    """
    X = problem.set
    beta = 1.0 / config.step
    x0 = _start(problem, config, x0)
    keep = problem.dim <= config.tolerances.trace_vector_max_dim
    trace: List[IterationRecord] = []
    s = np.zeros(problem.dim)
    acc = x0.copy()
    for k in range(1, config.iterations + 1):
        t0 = time.perf_counter_ns()
        v = dual_prox(x0, s / beta, X)
        x = X.project(v - problem.F(v) / beta)
        Fx = problem.F(x)
        s = s - Fx
        acc += x
        trace.append(IterationRecord(k, 1.0, float(np.linalg.norm(x - v)), None,
                                     time.perf_counter_ns() - t0,
                                     x=x if keep else None, v=v if keep else None,
                                     s=s.copy() if keep else None, Fx=Fx if keep else None))
    return _result(problem, config, x0, acc / (config.iterations + 1), trace, s)


BASELINES = {"extragradient": extragradient_run, "dual_extrapolation": dual_extrapolation_run}

"""Perseus: p-th order dual extrapolation for variational inequalities, and its
restarted variant.

One iteration of :func:`perseus_run`:

1. stop if ``residue(x_k) <= stop_residue``;
2. ``v_{k+1} = P_X(x_0 + s_k)``;
3. solve the regularized model VI at ``v_{k+1}`` to a certified accuracy;
4. ``lambda_{k+1} = p! / ((10p + 2) L r^(p-1))`` with ``r = ||x_{k+1} - v_{k+1}||``;
5. ``s_{k+1} = s_k - lambda_{k+1} F(x_{k+1})``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .core import ToleranceSet, VIProblem, as_vector
from .errors import BudgetExhausted, DegenerateStep, EmptyTrace, InvalidOpt, NotInSet, SubsolverFailure
from .metrics import dist_to_solution, residue
from .sets import FeasibleSet
from .subsolver import SubSolveCertificate, solve_subproblem
from .taylor import REG_FACTOR, build_model

__all__ = [
    "SolverConfig",
    "DualState",
    "IterationRecord",
    "EpochRecord",
    "SolveResult",
    "Status",
    "dual_prox",
    "lyapunov",
    "lambda_update",
    "bracket_bounds",
    "bracket_value",
    "t_inner",
    "perseus_run",
    "perseus_restart_run",
    "weighted_average",
    "best_iterate",
    "best_index",
]


class Status:
    CONVERGED = "Converged"
    ITERATIONS_EXHAUSTED = "IterationsExhausted"
    DEGENERATE_STOP = "DegenerateStop"
    SUBSOLVER_FAILURE = "SubsolverFailure"


@dataclass
class SolverConfig:
    order_p: int
    lipschitz_L: float
    iterations_T: int
    opt: int = 0
    tolerances: ToleranceSet = field(default_factory=ToleranceSet)
    reg_factor: float = REG_FACTOR
    inner_step_growth: float = 1.25
    # test hook: called as hook(k, lam) and its return value replaces lambda_k
    lambda_hook: Optional[Callable[[int, float], float]] = None

    def __post_init__(self):
        if self.order_p < 1:
            raise ValueError("order p must be >= 1")
        if not self.lipschitz_L > 0:
            raise ValueError("L must be positive")
        if self.iterations_T < 1:
            raise ValueError("T must be >= 1")
        if self.opt not in (0, 1, 2):
            raise InvalidOpt(f"opt must be 0, 1 or 2, got {self.opt}")


@dataclass
class DualState:
    s: np.ndarray
    x0: np.ndarray


@dataclass
class IterationRecord:
    k: int
    lam: float
    r: float
    certificate: Optional[SubSolveCertificate]
    wall_ns: int
    x: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None
    Fx: Optional[np.ndarray] = None
    residue: Optional[float] = None
    epoch: int = 0


@dataclass
class EpochRecord:
    epoch: int
    x_start: np.ndarray
    x_end: np.ndarray
    dist_start: Optional[float]
    dist_end: Optional[float]
    inner: "SolveResult"


@dataclass
class SolveResult:
    output: np.ndarray
    trace: List[IterationRecord]
    status: str
    x0: np.ndarray
    s_final: np.ndarray
    order_p: int
    lipschitz_L: float
    opt: int
    r_min: float
    sum_lambda: float = 0.0
    epochs: Optional[List[EpochRecord]] = None
    message: str = ""

    @property
    def iterations(self) -> int:
        return len(self.trace)


def dual_prox(anchor_x0, s, xset: FeasibleSet) -> np.ndarray:
    """``argmax_{v in X} <s, v - x0> - ||v - x0||^2 / 2``, i.e. ``P_X(x0 + s)``."""
    return xset.project(np.asarray(anchor_x0, dtype=float) + np.asarray(s, dtype=float))


def lyapunov(state: DualState, xset: FeasibleSet) -> float:
    v = dual_prox(state.x0, state.s, xset)
    d = v - state.x0
    return float(state.s @ d - 0.5 * d @ d)


def bracket_bounds(p: int) -> tuple:
    return 1.0 / (20 * p - 8), 1.0 / (10 * p + 2)


def bracket_value(p: int, L: float, lam: float, r: float) -> float:
    return lam * L * r ** (p - 1) / math.factorial(p)


def lambda_update(p: int, L: float, r: float, r_min: float = 1e-12) -> float:
    """Largest step in the admissible bracket: ``p! / ((10p + 2) L r^(p-1))``."""
    if L <= 0:
        raise ValueError("L must be positive")
    if r < r_min or (p > 1 and r == 0.0):
        raise DegenerateStep(f"r={r:.3e} below r_min={r_min:.3e}")
    return math.factorial(p) / ((10 * p + 2) * L * r ** (p - 1))


def _ceil(val: float) -> int:
    # absorb rounding so an exact integer is not bumped up by one
    near = round(val)
    if abs(val - near) <= 1e-9 * max(1.0, abs(val)):
        return int(near)
    return int(math.ceil(val))


def t_inner(p: int, L: float, sigma: float, D: float, opt: int) -> int:
    """Inner iteration count of the restart scheme."""
    if opt not in (0, 1, 2):
        raise InvalidOpt(f"opt must be 0, 1 or 2, got {opt}")
    if opt == 2:
        return 1
    if sigma <= 0 or D <= 0:
        raise ValueError("sigma and D must be positive")
    ratio = L * D ** (p - 1) / sigma
    pf = math.factorial(p)
    if opt == 0:
        return _ceil((2 ** (p + 1) * (5 * p - 2) / pf * ratio) ** (2.0 / (p + 1)))
    return _ceil((2 ** (p + 2) * (5 * p + 1) / pf * ratio) ** (2.0 / p)
                 + (2 ** (p + 5) / pf * ratio) ** (2.0 / (p + 1)))


def weighted_average(trace: List[IterationRecord]) -> np.ndarray:
    if not trace:
        raise EmptyTrace("weighted average of an empty trace")
    lam = np.array([rec.lam for rec in trace])
    X = np.array([rec.x for rec in trace])
    return lam @ X / lam.sum()


def best_index(trace: List[IterationRecord]) -> int:
    """1-based iteration index minimizing ``||x_k - v_k||`` (first on ties)."""
    if not trace:
        raise EmptyTrace("best iterate of an empty trace")
    return trace[int(np.argmin([rec.r for rec in trace]))].k


def best_iterate(trace: List[IterationRecord]) -> np.ndarray:
    if not trace:
        raise EmptyTrace("best iterate of an empty trace")
    return trace[int(np.argmin([rec.r for rec in trace]))].x


def _stop_level(tol: ToleranceSet, L: float, D: float, p: int) -> float:
    if tol.stop_residue is not None:
        return tol.stop_residue
    return tol.stop_residue_rel * L * D ** (p + 1)


def perseus_run(problem: VIProblem, config: SolverConfig, x0=None) -> SolveResult:
    """Run Perseus for at most ``config.iterations_T`` iterations.

    The output follows ``config.opt``: 0 is the lambda-weighted average, 1 the
    iterate with the smallest ``||x_k - v_k||``, 2 the last iterate. When the
    stop test fires at ``x_k`` that point is returned for every ``opt``.

    Raises :class:`SubsolverFailure` (carrying the partial result) when the
    inner solver cannot certify an iterate.
    """
    tol = config.tolerances
    p, L, T = config.order_p, config.lipschitz_L, config.iterations_T
    X = problem.set
    D = X.diameter
    x0 = problem.default_x0() if x0 is None else as_vector(x0, problem.dim)
    if not X.contains(x0, tol.membership):
        raise NotInSet("x0 must lie in the feasible set")
    r_min = tol.r_min_rel * D
    stop = _stop_level(tol, L, D, p)
    keep = problem.dim <= tol.trace_vector_max_dim

    s = np.zeros(problem.dim)
    xk = x0
    trace: List[IterationRecord] = []
    sum_lam = 0.0
    weighted = np.zeros(problem.dim)
    best_r, best_x = math.inf, x0
    status = Status.ITERATIONS_EXHAUSTED
    output = None

    def result(out, st, msg=""):
        return SolveResult(out, trace, st, x0, s.copy(), p, L, config.opt, r_min, sum_lam, message=msg)

    for k in range(T):
        res_k = residue(problem, xk, tol.membership)
        if trace:
            trace[-1].residue = res_k
        if res_k <= stop:
            status, output = Status.CONVERGED, xk
            break
        t0 = time.perf_counter_ns()
        v = dual_prox(x0, s, X)
        model = build_model(problem.oracle, v, p, L, config.reg_factor)
        try:
            cert = solve_subproblem(model, X, tol.inner_budget, r_min=r_min, degenerate_tol=stop,
                                    slack=tol.certificate_slack, step_growth=config.inner_step_growth)
        except BudgetExhausted as exc:
            raise SubsolverFailure(f"iteration {k + 1}: {exc}",
                                   partial=result(xk, Status.SUBSOLVER_FAILURE, str(exc))) from exc
        x_new = cert.candidate
        if cert.degenerate:
            status, output = Status.DEGENERATE_STOP, x_new
            break
        try:
            lam = lambda_update(p, L, cert.r, r_min)
        except DegenerateStep:
            status, output = Status.DEGENERATE_STOP, x_new
            break
        if config.lambda_hook is not None:
            lam = float(config.lambda_hook(k + 1, lam))
        Fx = problem.F(x_new)
        s = s - lam * Fx
        sum_lam += lam
        weighted += lam * x_new
        if cert.r < best_r:
            best_r, best_x = cert.r, x_new
        trace.append(IterationRecord(
            k=k + 1, lam=lam, r=cert.r, certificate=cert,
            wall_ns=time.perf_counter_ns() - t0,
            x=x_new if keep else None, v=v if keep else None,
            s=s.copy() if keep else None, Fx=Fx if keep else None,
        ))
        xk = x_new
    else:
        trace[-1].residue = residue(problem, xk, tol.membership)
        if trace[-1].residue <= stop:
            status = Status.CONVERGED

    if output is None:
        if config.opt == 0:
            output = weighted / sum_lam
        elif config.opt == 1:
            output = best_x
        else:
            output = xk
    return result(np.asarray(output, dtype=float), status)


def perseus_restart_run(problem: VIProblem, p: int, L: float, sigma: float, D: float,
                        outer_T: int, opt: int, tolerances: Optional[ToleranceSet] = None,
                        x0=None, **config_kwargs) -> SolveResult:
    """Restart Perseus from its own output every ``t_inner(...)`` iterations."""
    tol = ToleranceSet() if tolerances is None else tolerances
    T_in = t_inner(p, L, sigma, D, opt)
    X = problem.set
    x_start = problem.default_x0() if x0 is None else as_vector(x0, problem.dim)
    stop = _stop_level(tol, L, X.diameter, p)
    xk = x_start
    epochs: List[EpochRecord] = []
    trace: List[IterationRecord] = []
    status = Status.ITERATIONS_EXHAUSTED
    for e in range(outer_T):
        if residue(problem, xk, tol.membership) <= stop:
            status = Status.CONVERGED
            break
        cfg = SolverConfig(p, L, T_in, opt, tol, **config_kwargs)
        inner = perseus_run(problem, cfg, x0=xk)
        for rec in inner.trace:
            rec.epoch = e + 1
        trace.extend(inner.trace)
        epochs.append(EpochRecord(e + 1, xk, inner.output, dist_to_solution(problem, xk),
                                  dist_to_solution(problem, inner.output), inner))
        xk = inner.output
    sum_lam = float(sum(rec.lam for rec in trace))
    return SolveResult(xk, trace, status, x_start, np.zeros(problem.dim), p, L, opt,
                       tol.r_min_rel * X.diameter, sum_lam, epochs=epochs,
                       message=f"T_inner={T_in}")

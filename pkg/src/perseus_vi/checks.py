"""Runtime checks of the per-iteration and cumulative inequalities that the
convergence analysis of Perseus relies on.

Every check returns a :class:`CheckResult` with the two sides of the
inequality, so failures can be inspected rather than just flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .core import ToleranceSet, VIProblem
from .errors import NoKnownSolution
from .solver import DualState, SolveResult, bracket_bounds, bracket_value, dual_prox, lyapunov
from .subsolver import certificate_threshold, model_residue
from .taylor import build_model

__all__ = [
    "CheckResult",
    "check_bracket",
    "check_telescoping",
    "check_energy_inequality",
    "check_half_distance_bound",
    "check_step_length_sum",
    "check_step_size_sum",
    "check_certificates",
    "step_size_sum_lower_bound",
    "run_checks",
]


@dataclass
class CheckResult:
    name: str
    holds: bool
    lhs: float
    rhs: float
    detail: str = ""

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def _require_vectors(result: SolveResult):
    if result.trace and result.trace[0].x is None:
        raise ValueError("trace was recorded without vectors; raise trace_vector_max_dim")


def _close_le(lhs: float, rhs: float, rel: float) -> bool:
    return lhs <= rhs + rel * (1.0 + abs(lhs) + abs(rhs))


def check_bracket(result: SolveResult, slack: float = 1e-12) -> CheckResult:
    """``1/(20p-8) <= lambda L r^(p-1) / p! <= 1/(10p+2)`` on every record."""
    p, L = result.order_p, result.lipschitz_L
    lo, hi = bracket_bounds(p)
    worst, ok, bad_k = 0.0, True, None
    vals = []
    for rec in result.trace:
        if rec.r < result.r_min:
            continue
        b = bracket_value(p, L, rec.lam, rec.r)
        vals.append(b)
        viol = max(lo - b, b - hi, 0.0)
        if viol > slack and ok:
            ok, bad_k = False, rec.k
        worst = max(worst, viol)
    lhs = min(vals) if vals else lo
    rhs = max(vals) if vals else hi
    detail = f"range [{lhs:.6g}, {rhs:.6g}] vs [{lo:.6g}, {hi:.6g}]"
    if bad_k is not None:
        detail += f"; first violation at k={bad_k}"
    return CheckResult("bracket", ok, worst, slack, detail)


def check_telescoping(result: SolveResult, rel: float = 1e-9) -> CheckResult:
    """``s_k = -sum_i lambda_i F(x_i)`` at every k."""
    _require_vectors(result)
    acc = np.zeros_like(result.x0)
    worst, ok = 0.0, True
    for rec in result.trace:
        acc = acc - rec.lam * rec.Fx
        err = float(np.linalg.norm(rec.s - acc))
        bound = rel * (1.0 + np.linalg.norm(rec.s))
        worst = max(worst, err / bound)
        ok = ok and bool(err <= bound)
    return CheckResult("telescoping", ok, worst, 1.0)


def _weighted_sum(result: SolveResult, x: np.ndarray) -> float:
    return float(sum(rec.lam * (rec.Fx @ (rec.x - x)) for rec in result.trace))


def _sample_points(problem: VIProblem, result: SolveResult, rng, n: int) -> List[np.ndarray]:
    pts = list(problem.set.sample(rng, n))
    # the maximizer of <s_T, x - x0> - |x - x0|^2 / 2 is the tightest point for the
    # half-distance bound, so always include it
    pts.append(dual_prox(result.x0, result.s_final, problem.set))
    if problem.known_solution is not None:
        pts.append(np.asarray(problem.known_solution, dtype=float))
    return pts


def check_energy_inequality(problem: VIProblem, result: SolveResult, points, rel: float = 1e-9,
                 coefficient: float = 0.1) -> CheckResult:
    """``sum lambda_k <F(x_k), x_k - x> <= E_0 - E_T + <s_T, x - x0> - c sum r_k^2``.

    ``coefficient=0.1`` is the stated form; ``0.125`` is the sharper variant that
    the argument also yields and is reported as a diagnostic.
    """
    _require_vectors(result)
    E0 = 0.0
    ET = lyapunov(DualState(result.s_final, result.x0), problem.set)
    rsq = float(sum(rec.r ** 2 for rec in result.trace))
    ok, worst_lhs, worst_rhs, worst_gap = True, 0.0, 0.0, -math.inf
    for x in points:
        lhs = _weighted_sum(result, x)
        rhs = E0 - ET + float(result.s_final @ (x - result.x0)) - coefficient * rsq
        if lhs - rhs > worst_gap:
            worst_gap, worst_lhs, worst_rhs = lhs - rhs, lhs, rhs
        ok = ok and _close_le(lhs, rhs, rel)
    name = "lemma1" if coefficient == 0.1 else f"lemma1[c={coefficient:g}]"
    return CheckResult(name, ok, worst_lhs, worst_rhs)


def check_half_distance_bound(problem: VIProblem, result: SolveResult, points, rel: float = 1e-9) -> CheckResult:
    """``sum lambda_k <F(x_k), x_k - x> <= |x - x0|^2 / 2`` for the given points."""
    _require_vectors(result)
    ok, worst_lhs, worst_rhs, worst_gap = True, 0.0, 0.0, -math.inf
    for x in points:
        lhs = _weighted_sum(result, x)
        rhs = 0.5 * float(np.sum((x - result.x0) ** 2))
        if lhs - rhs > worst_gap:
            worst_gap, worst_lhs, worst_rhs = lhs - rhs, lhs, rhs
        ok = ok and _close_le(lhs, rhs, rel)
    return CheckResult("lemma2a", ok, worst_lhs, worst_rhs)


def check_step_length_sum(problem: VIProblem, result: SolveResult, rel: float = 1e-9) -> CheckResult:
    """``sum r_k^2 <= 4 |x* - x0|^2``."""
    if problem.known_solution is None:
        raise NoKnownSolution(problem.name)
    lhs = float(sum(rec.r ** 2 for rec in result.trace))
    rhs = 4.0 * float(np.sum((problem.known_solution - result.x0) ** 2))
    return CheckResult("lemma2b", _close_le(lhs, rhs, rel), lhs, rhs)


def step_size_sum_lower_bound(p: int, L: float, dist0: float, T: int) -> float:
    """``p!/((20p-8)L) * (1/(4 dist0^2))^((p-1)/2) * T^((p+1)/2)``."""
    if p > 1 and dist0 == 0.0:
        return math.inf
    scale = (1.0 / (4.0 * dist0 ** 2)) ** ((p - 1) / 2.0) if p > 1 else 1.0
    return math.factorial(p) / ((20 * p - 8) * L) * scale * T ** ((p + 1) / 2.0)


def check_step_size_sum(problem: VIProblem, result: SolveResult, rel: float = 1e-9) -> CheckResult:
    """``sum lambda_k`` against its lower bound (the ``>=``
    written as ``bound <= sum`` so that ``lhs <= rhs`` means pass)."""
    if problem.known_solution is None:
        raise NoKnownSolution(problem.name)
    T = len(result.trace)
    total = float(sum(rec.lam for rec in result.trace))
    if T == 0:
        return CheckResult("lemma3", True, 0.0, total, "empty trace")
    dist0 = float(np.linalg.norm(problem.known_solution - result.x0))
    bound = step_size_sum_lower_bound(result.order_p, result.lipschitz_L, dist0, T)
    return CheckResult("lemma3", _close_le(bound, total, rel), bound, total)


def check_certificates(problem: VIProblem, result: SolveResult, rel: float = 1e-9) -> CheckResult:
    """Rebuild each model from scratch and recompute its residue at ``x_k``."""
    _require_vectors(result)
    p, L = result.order_p, result.lipschitz_L
    ok, worst = True, 0.0
    for rec in result.trace:
        model = build_model(problem.oracle, rec.v, p, L)
        res = model_residue(model, rec.x, problem.set)
        thr = certificate_threshold(model, rec.x)
        good = res <= thr * (1.0 + rel)
        ok = ok and good
        if thr > 0:
            worst = max(worst, res / thr)
        elif res > 0:
            worst = math.inf
    return CheckResult("certificates", ok, worst, 1.0 + rel, "worst residue/threshold ratio")


def _inner_runs(result: SolveResult) -> List[SolveResult]:
    return [e.inner for e in result.epochs] if result.epochs else [result]


def run_checks(problem: VIProblem, result: SolveResult, n_samples: int = 20,
               rng: Optional[np.random.Generator] = None,
               tolerances: Optional[ToleranceSet] = None) -> Dict[str, CheckResult]:
    """All applicable checks; for a restarted run each epoch is checked on its own.

    The half-distance bound needs only the Lyapunov argument and is always
    checked. The bound on ``sum r_k^2`` and the lower bound on ``sum lambda_k``
    use ``<F(x_k), x_k - x*> >= 0``, so they are reported only when the problem
    has a known solution and a regularity tag that gives the Minty inequality.
    """
    tol = ToleranceSet() if tolerances is None else tolerances
    rng = np.random.default_rng(0) if rng is None else rng
    merged: Dict[str, CheckResult] = {}

    def merge(res: CheckResult):
        prev = merged.get(res.name)
        if prev is None or (prev.holds and not res.holds) or (prev.holds == res.holds and res.margin < prev.margin):
            merged[res.name] = res

    weak = problem.known_solution is not None and problem.regularity.has_weak_solution
    for run in _inner_runs(result):
        merge(check_bracket(run, tol.bracket_slack))
        if not run.trace or run.trace[0].x is None:
            continue
        merge(check_telescoping(run, tol.telescoping_rel))
        pts = _sample_points(problem, run, rng, n_samples)
        merge(check_energy_inequality(problem, run, pts, tol.lemma_rel))
        merge(check_energy_inequality(problem, run, pts, tol.lemma_rel, coefficient=0.125))
        merge(check_certificates(problem, run, tol.certificate_slack))
        merge(check_half_distance_bound(problem, run, pts, tol.lemma_rel))
        if weak:
            merge(check_step_length_sum(problem, run, tol.lemma_rel))
            merge(check_step_size_sum(problem, run, tol.lemma_rel))
    return merged

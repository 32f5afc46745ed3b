"""Certified inexact solution of the regularized model VI.

Finds ``x`` in X with ``sup_{x' in X} <F_v(x), x - x'> <= (L/p!) ||x - v||^(p+1)``.
The left side is evaluated exactly with one call to the set's LMO.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, NotInSet
from .sets import FeasibleSet
from .taylor import REG_FACTOR, TaylorModel

__all__ = ["SubSolveCertificate", "model_residue", "certificate_threshold", "solve_subproblem"]


@dataclass
class SubSolveCertificate:
    candidate: np.ndarray
    model_residue: float
    threshold: float
    inner_iterations: int
    r: float
    certified: bool
    degenerate: bool = False

    @property
    def ratio(self) -> float:
        if self.threshold > 0:
            return self.model_residue / self.threshold
        return 0.0 if self.model_residue == 0 else math.inf


def _residue_of(g: np.ndarray, xhat: np.ndarray, xset: FeasibleSet) -> float:
    val = float(g @ (xhat - xset.lmo(-g)))
    return max(val, 0.0)


def model_residue(model: TaylorModel, xhat, xset: FeasibleSet, tol: float = 1e-8) -> float:
    """``sup_{x in X} <F_v(xhat), xhat - x>``, attained at ``lmo(-F_v(xhat))``.

    Small negative values caused by rounding are reported as 0.
    """
    xhat = np.asarray(xhat, dtype=float)
    if not xset.contains(xhat, tol):
        raise NotInSet("candidate is not in the feasible set")
    return _residue_of(model(xhat), xhat, xset)


def certificate_threshold(model: TaylorModel, xhat) -> float:
    r = float(np.linalg.norm(np.asarray(xhat, dtype=float) - model.center_v))
    return model.lipschitz_L / math.factorial(model.order_p) * r ** (model.order_p + 1)


def _certificate(model, xset, x, iters, r_min, degenerate_tol, slack):
    g = model(x)
    res = _residue_of(g, x, xset)
    r = float(np.linalg.norm(x - model.center_v))
    thr = model.lipschitz_L / math.factorial(model.order_p) * r ** (model.order_p + 1)
    if r < r_min:
        ok = res <= degenerate_tol
        return SubSolveCertificate(x, res, thr, iters, r, certified=ok, degenerate=ok)
    return SubSolveCertificate(x, res, thr, iters, r, certified=res <= thr * (1 + slack))


def _operator_norm_estimate(model: TaylorModel, rng: np.random.Generator, n: int = 8) -> float:
    if model.jacobian is not None:
        return float(np.linalg.norm(model.jacobian, 2))
    if model.order_p < 2:
        return 0.0
    H = rng.standard_normal((n, model.dim))
    H /= np.linalg.norm(H, axis=1, keepdims=True)
    return max(float(np.linalg.norm(model.source.deriv_apply(model.center_v, 1, h))) for h in H)


def solve_subproblem(model: TaylorModel, xset: FeasibleSet, budget: int = 5000,
                     r_min: float = 0.0, degenerate_tol: float = 0.0,
                     slack: float = 1e-9, theta: float = 0.9,
                     step_growth: float = 1.25) -> SubSolveCertificate:
    """Return the first certified iterate of the inner solver.

    ``p = 1`` uses the exact closed form ``P_X(v - F(v) / (5L))``. For
    ``p >= 2`` projected extragradient runs on ``F_v`` with a backtracking step
    (halve until ``eta ||F_v(y) - F_v(x)|| <= theta ||y - x||``). After every
    accepted step the trial step is multiplied by ``step_growth``.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    v = model.center_v
    p = model.order_p
    if p == 1:
        x = xset.project(v - model.F_center / model.reg_coefficient)
        cert = _certificate(model, xset, x, 1, r_min, degenerate_tol, slack)
        if not cert.certified:
            raise BudgetExhausted("closed-form step failed certification", best=cert)
        return cert

    x = xset.project(v)
    cert = _certificate(model, xset, x, 0, r_min, degenerate_tol, slack)
    if cert.certified:
        return cert
    best = cert

    rng = np.random.default_rng(0)
    D = max(xset.diameter, 1e-300)
    eta0 = 1.0 / (REG_FACTOR * model.lipschitz_L * D ** (p - 2) + _operator_norm_estimate(model, rng))
    eta = eta0
    gx = model(x)
    for it in range(1, budget + 1):
        while True:
            y = xset.project(x - eta * gx)
            gy = model(y)
            step = np.linalg.norm(y - x)
            if eta * np.linalg.norm(gy - gx) <= theta * step or step == 0.0:
                break
            eta *= 0.5
        x = xset.project(x - eta * gy)
        gx = model(x)
        for cand in (y, x):
            c = _certificate(model, xset, cand, it, r_min, degenerate_tol, slack)
            if c.certified:
                return c
            if c.ratio < best.ratio:
                best = c
        eta *= step_growth
    raise BudgetExhausted(f"no certified iterate within {budget} inner iterations", best=best)


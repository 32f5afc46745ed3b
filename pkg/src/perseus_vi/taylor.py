"""Regularized (p-1)-th order Taylor model of an operator around a center v."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import OperatorOracle, as_vector
from .errors import OrderUnavailable

__all__ = ["TaylorModel", "build_model", "remainder_check", "RemainderCheck"]

REG_FACTOR = 5.0


@dataclass
class TaylorModel:
    """``x -> F(v) + sum_k (1/k!) D^k F(v)[x-v]^k + c ||x-v||^(p-1) (x-v)``.

    The sum runs over ``k = 1 .. p-1`` and ``c = reg_coefficient``, which is
    ``5 L / (p-1)!`` by default.
    """

    source: OperatorOracle
    center_v: np.ndarray
    order_p: int
    lipschitz_L: float
    reg_coefficient: float
    F_center: np.ndarray = field(repr=False)
    jacobian: Optional[np.ndarray] = field(default=None, repr=False)
    # F is a polynomial of degree <= p-1, so its Taylor part is F itself
    exact: bool = False

    @property
    def dim(self) -> int:
        return self.center_v.size

    def taylor_part(self, x) -> np.ndarray:
        if self.exact:
            # same value as the expansion, without cancelling F(v) against J (x - v)
            return self.source.eval(x)
        h = np.asarray(x, dtype=float) - self.center_v
        out = self.F_center.copy()
        for k in range(1, self.order_p):
            if k == 1 and self.jacobian is not None:
                out += self.jacobian @ h
            else:
                out += self.source.deriv_apply(self.center_v, k, h) / math.factorial(k)
        return out

    def regularizer(self, x) -> np.ndarray:
        h = np.asarray(x, dtype=float) - self.center_v
        nrm = np.linalg.norm(h)
        if nrm == 0.0:
            return np.zeros_like(h)
        return self.reg_coefficient * nrm ** (self.order_p - 1) * h

    def eval(self, x) -> np.ndarray:
        return self.taylor_part(x) + self.regularizer(x)

    __call__ = eval


def build_model(oracle: OperatorOracle, v, p: int, L: float,
                reg_factor: float = REG_FACTOR, dense_jacobian_max_dim: int = 256) -> TaylorModel:
    if p < 1:
        raise ValueError("order p must be >= 1")
    if p - 1 > oracle.max_order:
        raise OrderUnavailable(f"model of order p={p} needs derivatives up to {p - 1}")
    v = as_vector(v, oracle.dim)
    J = None
    if p >= 2 and oracle.dim <= dense_jacobian_max_dim:
        J = np.column_stack([oracle.deriv_apply(v, 1, e) for e in np.eye(oracle.dim)])
    return TaylorModel(
        source=oracle,
        center_v=v,
        order_p=p,
        lipschitz_L=float(L),
        reg_coefficient=reg_factor * L / math.factorial(p - 1),
        F_center=oracle.eval(v),
        jacobian=J,
        exact=oracle.lipschitz.get(p) == 0.0,
    )


@dataclass
class RemainderCheck:
    lhs: float
    rhs: float
    holds: bool


def remainder_check(oracle: OperatorOracle, model: TaylorModel, x, rel: float = 1e-9) -> RemainderCheck:
    """Compare ``||F(x) - Taylor part||`` with ``(L/p!) ||x-v||^p``."""
    x = as_vector(x, oracle.dim)
    Fx = oracle.eval(x)
    lhs = float(np.linalg.norm(Fx - model.taylor_part(x)))
    rhs = model.lipschitz_L / math.factorial(model.order_p) * np.linalg.norm(x - model.center_v) ** model.order_p
    # floor for rounding in the subtraction
    floor = 64 * np.finfo(float).eps * (1.0 + np.linalg.norm(Fx))
    return RemainderCheck(lhs, float(rhs), lhs <= rhs * (1 + rel) + floor)

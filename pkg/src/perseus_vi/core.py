"""Core data model: operator oracles, problem descriptors, tolerances, and
sampled regularity validators (smoothness, monotonicity, Minty margin)."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, NoKnownSolution, OrderUnavailable
from .sets import FeasibleSet

__all__ = [
    "ToleranceSet",
    "OperatorOracle",
    "Regularity",
    "SaddleStructure",
    "VIProblem",
    "MonotoneReport",
    "as_vector",
    "estimate_smoothness",
    "check_monotone",
    "minty_margin",
]


@dataclass(frozen=True)
class ToleranceSet:
    """Every numerical tolerance used by the package, in one place.

    ``r_min`` and ``stop_residue`` are relative: the solver multiplies them by
    ``D`` and ``L * D**(p+1)`` respectively. ``stop_residue=None`` keeps the
    default scale of ``1e-10``.
    """

    r_min_rel: float = 1e-12
    stop_residue: Optional[float] = None
    stop_residue_rel: float = 1e-10
    inner_budget: int = 5000
    certificate_slack: float = 1e-9
    bracket_slack: float = 1e-12
    telescoping_rel: float = 1e-9
    lemma_rel: float = 1e-9
    membership: float = 1e-8
    projection: float = 1e-9
    dykstra: float = 1e-10
    dykstra_max_iter: int = 10_000
    monotone: float = 1e-12
    fd_eps: float = 1e-5
    trace_vector_max_dim: int = 64

    def replace(self, **changes) -> "ToleranceSet":
        return dataclasses.replace(self, **changes)


def as_vector(x, dim: Optional[int] = None) -> np.ndarray:
    """Convert to a finite 1-D float array, optionally checking its length."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


@dataclass(frozen=True)
class OperatorOracle:
    """An operator ``F: R^d -> R^d`` with derivative actions.

    ``deriv(x, k, h)`` must return ``d^k/dt^k F(x + t h)`` at ``t = 0``,
    i.e. ``nabla^(k) F(x)[h]^k``. ``lipschitz`` maps an order ``p`` to a
    constant ``L`` for which the ``(p-1)``-th derivative is L-Lipschitz on the
    region of interest. A value of 0 means that derivative is constant.
    """

    dim: int
    max_order: int
    F: Callable[[np.ndarray], np.ndarray]
    deriv: Optional[Callable[[np.ndarray, int, np.ndarray], np.ndarray]] = None
    lipschitz: Mapping[int, float] = field(default_factory=dict)

    def eval(self, x) -> np.ndarray:
        return np.asarray(self.F(as_vector(x, self.dim)), dtype=float)

    def deriv_apply(self, x, k: int, h) -> np.ndarray:
        if k == 0:
            return self.eval(x)
        if k < 0 or k > self.max_order or self.deriv is None:
            raise OrderUnavailable(f"derivative order {k} unavailable (max_order={self.max_order})")
        return np.asarray(self.deriv(as_vector(x, self.dim), k, as_vector(h, self.dim)), dtype=float)

    def lipschitz_L(self, p: int) -> float:
        """Smoothness constant for order ``p - 1`` (the one Perseus of order p needs)."""
        if p in self.lipschitz:
            return float(self.lipschitz[p])
        raise KeyError(f"no smoothness constant recorded for p={p}")


@dataclass(frozen=True)
class Regularity:
    kind: str = "unknown"
    modulus: float = 0.0

    KINDS = ("monotone", "strongly_monotone", "minty", "strong_minty", "unknown")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown regularity {self.kind!r}")

    @property
    def is_monotone(self) -> bool:
        return self.kind in ("monotone", "strongly_monotone")

    @property
    def has_weak_solution(self) -> bool:
        return self.kind != "unknown"


@dataclass(frozen=True)
class SaddleStructure:
    """``min_z max_y f(z, y)`` layout of a VI with ``x = (z, y)``.

    ``max_y(z)`` and ``min_z(y)`` return exact inner optimal values.
    """

    z_slice: slice
    y_slice: slice
    f: Callable[[np.ndarray, np.ndarray], float]
    max_y: Callable[[np.ndarray], float]
    min_z: Callable[[np.ndarray], float]

    def split(self, x):
        x = np.asarray(x, dtype=float)
        return x[self.z_slice], x[self.y_slice]


@dataclass(frozen=True)
class VIProblem:
    name: str
    oracle: OperatorOracle
    set: FeasibleSet
    regularity: Regularity = Regularity()
    known_solution: Optional[np.ndarray] = None
    saddle: Optional[SaddleStructure] = None
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.oracle.dim != self.set.dim:
            raise DimensionMismatch("oracle and set dimensions differ")

    @property
    def dim(self) -> int:
        return self.oracle.dim

    def F(self, x) -> np.ndarray:
        return self.oracle.eval(x)

    def default_x0(self) -> np.ndarray:
        x0 = self.metadata.get("x0")
        if x0 is not None:
            return as_vector(x0, self.dim)
        return self.set.lmo(np.ones(self.dim))


def _pairs(sample_pairs, dim):
    for x, y in sample_pairs:
        yield as_vector(x, dim), as_vector(y, dim)


def estimate_smoothness(oracle: OperatorOracle, order: int,
                        sample_pairs: Sequence, n_directions: int = 64,
                        rng: Optional[np.random.Generator] = None) -> float:
    """Sampled estimate of the Lipschitz constant of the ``order``-th derivative.

    For ``order >= 1`` the operator norm of the derivative difference is
    estimated by maximizing ``||(D^k F(x) - D^k F(x'))[h]^k||`` over random
    unit directions ``h``. This is a lower estimate of the true constant.
    """
    if order > oracle.max_order:
        raise OrderUnavailable(f"order {order} > max_order {oracle.max_order}")
    n_directions = max(32, n_directions)
    rng = np.random.default_rng(0) if rng is None else rng
    best = 0.0
    for x, y in _pairs(sample_pairs, oracle.dim):
        dist = np.linalg.norm(x - y)
        if dist == 0.0:
            continue
        if order == 0:
            diff = np.linalg.norm(oracle.eval(x) - oracle.eval(y))
        else:
            H = rng.standard_normal((n_directions, oracle.dim))
            H /= np.linalg.norm(H, axis=1, keepdims=True)
            diff = max(np.linalg.norm(oracle.deriv_apply(x, order, h) - oracle.deriv_apply(y, order, h))
                       for h in H)
        best = max(best, float(diff / dist))
    return best


@dataclass
class MonotoneReport:
    min_inner_product: float
    violating_pair: Optional[tuple]

    @property
    def violated(self) -> bool:
        return self.violating_pair is not None


def check_monotone(oracle: OperatorOracle, sample_pairs: Sequence, tol: float = 1e-12) -> MonotoneReport:
    """Minimum of ``<F(x) - F(x'), x - x'>`` over the pairs, with the worst pair if negative."""
    worst = math.inf
    worst_pair = None
    for x, y in _pairs(sample_pairs, oracle.dim):
        val = float((oracle.eval(x) - oracle.eval(y)) @ (x - y))
        if val < worst:
            worst, worst_pair = val, (x, y)
    if worst == math.inf:
        worst = 0.0
    return MonotoneReport(worst, worst_pair if worst < -tol else None)


def minty_margin(problem: VIProblem, x) -> float:
    """``<F(x), x - x*>``; nonnegative everywhere on X under the Minty condition."""
    if problem.known_solution is None:
        raise NoKnownSolution(problem.name)
    x = as_vector(x, problem.dim)
    return float(problem.F(x) @ (x - problem.known_solution))

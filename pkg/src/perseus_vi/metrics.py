"""Optimality measures: residue, exact saddle gap, restricted gap, distance to x*."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import VIProblem, as_vector
from .errors import EmptyCertificateSet, NoSaddleStructure, NotInSet

__all__ = [
    "MetricReport",
    "residue",
    "gap_saddle",
    "gap",
    "has_exact_gap",
    "restricted_gap",
    "dist_to_solution",
    "default_certificates",
    "evaluate",
]


def _in_set(problem: VIProblem, x, tol: float) -> np.ndarray:
    x = as_vector(x, problem.dim)
    if not problem.set.contains(x, tol):
        raise NotInSet(f"point is not in the feasible set of {problem.name}")
    return x


def residue(problem: VIProblem, xhat, tol: float = 1e-8) -> float:
    """``sup_{x in X} <F(xhat), xhat - x>``, evaluated with one LMO call."""
    xhat = _in_set(problem, xhat, tol)
    g = problem.F(xhat)
    return float(g @ (xhat - problem.set.lmo(-g)))


def has_exact_gap(problem: VIProblem) -> bool:
    return problem.saddle is not None


def gap_saddle(problem: VIProblem, zhat, yhat) -> float:
    """``max_y f(zhat, y) - min_z f(z, yhat)`` with exact inner optimization."""
    if problem.saddle is None:
        raise NoSaddleStructure(problem.name)
    s = problem.saddle
    return float(s.max_y(np.asarray(zhat, dtype=float)) - s.min_z(np.asarray(yhat, dtype=float)))


def gap(problem: VIProblem, xhat, tol: float = 1e-8) -> float:
    xhat = _in_set(problem, xhat, tol)
    if problem.saddle is None:
        raise NoSaddleStructure(problem.name)
    z, y = problem.saddle.split(xhat)
    return gap_saddle(problem, z, y)


def restricted_gap(problem: VIProblem, xhat, certificate_points: Iterable) -> float:
    """``max_x <F(x), xhat - x>`` over the given points; a lower bound on the gap."""
    xhat = as_vector(xhat, problem.dim)
    pts = [as_vector(c, problem.dim) for c in certificate_points]
    if not pts:
        raise EmptyCertificateSet("restricted gap needs at least one certificate point")
    return max(float(problem.F(x) @ (xhat - x)) for x in pts)


def dist_to_solution(problem: VIProblem, x) -> Optional[float]:
    if problem.known_solution is None:
        return None
    return float(np.linalg.norm(as_vector(x, problem.dim) - problem.known_solution))


def default_certificates(problem: VIProblem, iterates: Iterable = (), max_dim: int = 8,
                         trailing: int = 16) -> list:
    """Extreme points (small d), the known solution, and trailing solver iterates."""
    pts = list(problem.set.extreme_points(max_dim))
    if problem.known_solution is not None:
        pts.append(np.asarray(problem.known_solution, dtype=float))
    its = list(iterates)
    pts.extend(np.asarray(x, dtype=float) for x in its[-trailing:])
    return pts


@dataclass
class MetricReport:
    residue: float
    gap: Optional[float] = None
    restricted_gap: Optional[float] = None
    dist_to_solution: Optional[float] = None


def evaluate(problem: VIProblem, xhat, certificate_points: Optional[Iterable] = None) -> MetricReport:
    pts = default_certificates(problem) if certificate_points is None else list(certificate_points)
    return MetricReport(
        residue=residue(problem, xhat),
        gap=gap(problem, xhat) if has_exact_gap(problem) else None,
        restricted_gap=restricted_gap(problem, xhat, pts) if pts else None,
        dist_to_solution=dist_to_solution(problem, xhat),
    )

"""Convex, bounded feasible sets with projection and linear-maximization oracles.

Every set exposes the same small surface:

* ``project(y)``  -- Euclidean projection onto the set,
* ``lmo(c)``      -- a maximizer of ``<c, x>`` over the set,
* ``diameter``    -- ``max ||x - x'||`` over the set (exact, or a stated upper bound),
* ``contains(x, tol)`` and ``sample(rng, n)``.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch

__all__ = [
    "FeasibleSet",
    "Box",
    "Ball",
    "Simplex",
    "ProductSet",
    "PolyhedralSet",
]


def _check_dim(x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise DimensionMismatch(f"expected shape ({dim},), got {x.shape}")
    return x


class FeasibleSet(ABC):
    dim: int

    @property
    @abstractmethod
    def diameter(self) -> float: ...

    @abstractmethod
    def project(self, y) -> np.ndarray: ...

    @abstractmethod
    def lmo(self, c) -> np.ndarray: ...

    @abstractmethod
    def contains(self, x, tol: float = 1e-9) -> bool: ...

    def extreme_points(self, max_dim: int = 8) -> list[np.ndarray]:
        """A finite list of extreme points, used as default gap certificates."""
        return []

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Random feasible points: convex combinations of LMO outputs."""
        out = np.empty((n, self.dim))
        for j in range(n):
            verts = np.array([self.lmo(rng.standard_normal(self.dim)) for _ in range(3)])
            w = rng.dirichlet(np.ones(len(verts)))
            out[j] = w @ verts
        return out


class Box(FeasibleSet):
    """Axis-aligned box ``lo <= x <= hi``. Degenerate coordinates (lo == hi) are allowed."""

    def __init__(self, lo, hi):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        lo, hi = np.broadcast_arrays(lo, hi)
        if np.any(hi < lo) or not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box requires finite bounds with lo <= hi")
        self.lo = lo.copy()
        self.hi = hi.copy()
        self.dim = lo.size

    @classmethod
    def cube(cls, dim: int, radius: float = 1.0) -> "Box":
        return cls(-radius * np.ones(dim), radius * np.ones(dim))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def project(self, y):
        return np.clip(_check_dim(y, self.dim), self.lo, self.hi)

    def lmo(self, c):
        c = _check_dim(c, self.dim)
        return np.where(c >= 0, self.hi, self.lo)

    def contains(self, x, tol=1e-9):
        x = _check_dim(x, self.dim)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def extreme_points(self, max_dim=8):
        free = np.flatnonzero(self.hi > self.lo)
        if free.size > max_dim:
            return []
        pts = []
        for bits in itertools.product((0, 1), repeat=free.size):
            x = self.lo.copy()
            x[free] = np.where(np.array(bits, dtype=bool), self.hi[free], self.lo[free])
            pts.append(x)
        return pts

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))


class Ball(FeasibleSet):
    def __init__(self, center, radius: float):
        self.center = np.atleast_1d(np.asarray(center, dtype=float)).copy()
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.dim = self.center.size

    @property
    def diameter(self):
        return 2.0 * self.radius

    def project(self, y):
        d = _check_dim(y, self.dim) - self.center
        nrm = np.linalg.norm(d)
        if nrm <= self.radius:
            return self.center + d
        return self.center + d * (self.radius / nrm)

    def lmo(self, c):
        c = _check_dim(c, self.dim)
        nrm = np.linalg.norm(c)
        if nrm == 0.0:
            return self.center.copy()
        return self.center + self.radius * c / nrm

    def contains(self, x, tol=1e-9):
        return bool(np.linalg.norm(_check_dim(x, self.dim) - self.center) <= self.radius + tol)

    def extreme_points(self, max_dim=8):
        if self.dim > max_dim:
            return []
        eye = np.eye(self.dim) * self.radius
        return [self.center + e for e in eye] + [self.center - e for e in eye]

    def sample(self, rng, n):
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = self.radius * rng.uniform(size=(n, 1)) ** (1.0 / self.dim)
        return self.center + g * rad


class Simplex(FeasibleSet):
    """Scaled probability simplex ``{x >= 0, sum(x) = scale}``."""

    def __init__(self, dim: int, scale: float = 1.0):
        if dim < 1 or scale <= 0:
            raise ValueError("simplex requires dim >= 1 and scale > 0")
        self.dim = int(dim)
        self.scale = float(scale)

    @property
    def diameter(self):
        return self.scale * np.sqrt(2.0) if self.dim > 1 else 0.0

    def project(self, y):
        # sort-based projection (Held, Wolfe, Crowder; Duchi et al.)
        y = _check_dim(y, self.dim)
        u = np.sort(y)[::-1]
        css = np.cumsum(u) - self.scale
        ind = np.arange(1, self.dim + 1)
        rho = np.nonzero(u - css / ind > 0)[0][-1]
        theta = css[rho] / (rho + 1.0)
        return np.maximum(y - theta, 0.0)

    def lmo(self, c):
        c = _check_dim(c, self.dim)
        x = np.zeros(self.dim)
        x[int(np.argmax(c))] = self.scale
        return x

    def contains(self, x, tol=1e-9):
        x = _check_dim(x, self.dim)
        return bool(np.all(x >= -tol) and abs(x.sum() - self.scale) <= tol * max(1.0, self.scale))

    def extreme_points(self, max_dim=8):
        if self.dim > max_dim:
            return []
        return [self.scale * e for e in np.eye(self.dim)]

    def sample(self, rng, n):
        return self.scale * rng.dirichlet(np.ones(self.dim), size=n)


class ProductSet(FeasibleSet):
    """Cartesian product of sets; coordinates are concatenated in order."""

    def __init__(self, blocks: Sequence[FeasibleSet]):
        self.blocks = list(blocks)
        offsets = np.cumsum([0] + [b.dim for b in self.blocks])
        self.slices = [slice(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:])]
        self.dim = int(offsets[-1])

    @property
    def diameter(self):
        return float(np.sqrt(sum(b.diameter ** 2 for b in self.blocks)))

    def _blockwise(self, fn, v):
        v = _check_dim(v, self.dim)
        return np.concatenate([fn(b, v[s]) for b, s in zip(self.blocks, self.slices)])

    def project(self, y):
        return self._blockwise(lambda b, u: b.project(u), y)

    def lmo(self, c):
        return self._blockwise(lambda b, u: b.lmo(u), c)

    def contains(self, x, tol=1e-9):
        x = _check_dim(x, self.dim)
        return all(b.contains(x[s], tol) for b, s in zip(self.blocks, self.slices))

    def extreme_points(self, max_dim=8):
        if self.dim > max_dim:
            return []
        per_block = [b.extreme_points(max_dim) for b in self.blocks]
        if any(len(p) == 0 for p in per_block):
            return []
        return [np.concatenate(combo) for combo in itertools.product(*per_block)]

    def sample(self, rng, n):
        return np.hstack([b.sample(rng, n) for b in self.blocks])


class PolyhedralSet(FeasibleSet):
    """Bounded polyhedron ``{A_ub x <= b_ub, A_eq x = b_eq}``.

    Projection uses Dykstra's alternating projections over the individual
    half-spaces and hyperplanes; the LMO is a linear program. The diameter
    cannot be computed cheaply in general, so the caller supplies it.
    """

    def __init__(self, A_ub, b_ub, diameter: float, A_eq=None, b_eq=None,
                 tol: float = 1e-10, max_iter: int = 10_000, sampler=None):
        self.A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        self.b_ub = np.asarray(b_ub, dtype=float).ravel()
        self.dim = self.A_ub.shape[1]
        if A_eq is None:
            self.A_eq = np.zeros((0, self.dim))
            self.b_eq = np.zeros(0)
        else:
            self.A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
            self.b_eq = np.asarray(b_eq, dtype=float).ravel()
        self._diameter = float(diameter)
        self.tol = tol
        self.max_iter = max_iter
        self.last_iterations = 0
        self._sampler = sampler
        # (normal, offset, is_equality) with normals pre-scaled for projection
        self._constraints = [(a, b, False) for a, b in zip(self.A_ub, self.b_ub)]
        self._constraints += [(a, b, True) for a, b in zip(self.A_eq, self.b_eq)]
        self._sqnorms = [float(a @ a) for a, _, _ in self._constraints]

    @property
    def diameter(self):
        return self._diameter

    def violation(self, x) -> float:
        x = _check_dim(x, self.dim)
        v = 0.0
        if self.b_ub.size:
            v = max(v, float(np.max(self.A_ub @ x - self.b_ub)))
        if self.b_eq.size:
            v = max(v, float(np.max(np.abs(self.A_eq @ x - self.b_eq))))
        return v

    def contains(self, x, tol=1e-9):
        return self.violation(x) <= tol

    def project(self, y):
        y = _check_dim(y, self.dim).copy()
        if self.violation(y) <= 0.0:
            self.last_iterations = 0
            return y
        m = len(self._constraints)
        incr = np.zeros((m, self.dim))
        x = y
        for it in range(1, self.max_iter + 1):
            x_prev = x.copy()
            incr_prev = incr.copy()
            for i, ((a, b, eq), sq) in enumerate(zip(self._constraints, self._sqnorms)):
                u = x + incr[i]
                slack = a @ u - b
                if eq or slack > 0:
                    x_new = u - (slack / sq) * a
                else:
                    x_new = u
                incr[i] = u - x_new
                x = x_new
            # x alone can repeat for a sweep while the corrections still move
            if (np.linalg.norm(x - x_prev) <= self.tol and np.linalg.norm(incr - incr_prev) <= self.tol
                    and self.violation(x) <= self.tol):
                self.last_iterations = it
                return x
        self.last_iterations = self.max_iter
        return x

    def lmo(self, c):
        c = _check_dim(c, self.dim)
        res = linprog(-c, A_ub=self.A_ub if self.b_ub.size else None,
                      b_ub=self.b_ub if self.b_ub.size else None,
                      A_eq=self.A_eq if self.b_eq.size else None,
                      b_eq=self.b_eq if self.b_eq.size else None,
                      bounds=[(None, None)] * self.dim, method="highs")
        if res.status != 0:
            raise RuntimeError(f"LMO linear program failed: {res.message}")
        return np.asarray(res.x, dtype=float)

    def sample(self, rng, n):
        if self._sampler is not None:
            return np.asarray(self._sampler(rng, n), dtype=float)
        return super().sample(rng, n)

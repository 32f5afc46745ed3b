"""Problem zoo with closed-form operators and derivative actions.

Every constructor returns a :class:`VIProblem`. ``deriv(x, k, h)`` always
means ``d^k/dt^k F(x + t h)`` at ``t = 0``. Smoothness constants are stored in
``oracle.lipschitz`` keyed by the Perseus order ``p`` they serve (the constant
of the ``(p-1)``-th derivative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from .core import (OperatorOracle, Regularity, SaddleStructure, VIProblem, check_monotone,
                   estimate_smoothness)
from .errors import BruteForceMismatch, InvalidSpec, UnknownProblem
from .sets import Box, PolyhedralSet, ProductSet

__all__ = [
    "make_bilinear_saddle",
    "make_cubic_bilinear",
    "make_strongly_monotone",
    "make_minty_scalar",
    "make_strong_minty",
    "make_zero",
    "HardInstanceSpec",
    "HardInstanceReport",
    "make_hard_instance",
    "hard_instance_value",
    "hard_instance_optimal_value",
    "validate_hard_instance",
    "restricted_minmax_value",
    "zero_chain_profile",
    "PROBLEMS",
    "build_problem",
]

_MAX_ORDER = 8


def _falling(m: int, j: int) -> float:
    """``m (m-1) ... (m-j+1)``: the j-th derivative coefficient of ``t^m``."""
    return float(math.perm(m, j)) if 0 <= j <= m else 0.0


def _power_deriv(base, dirn, m: int, j: int) -> np.ndarray:
    """``d^j/dt^j (base + t dirn)^m`` at ``t = 0``, elementwise."""
    coef = _falling(m, j)
    if coef == 0.0:
        return np.zeros_like(base)
    return coef * base ** (m - j) * dirn ** j


def _product_deriv(a, ha, m: int, b, hb, n: int, k: int) -> np.ndarray:
    """``d^k/dt^k (a + t ha)^m (b + t hb)^n`` at ``t = 0`` by the Leibniz rule."""
    out = np.zeros_like(a)
    for j in range(k + 1):
        out = out + math.comb(k, j) * _power_deriv(a, ha, m, j) * _power_deriv(b, hb, n, k - j)
    return out


def _linear_oracle(M: np.ndarray, lipschitz: Mapping[int, float]) -> OperatorOracle:
    def deriv(x, k, h):
        return M @ h if k == 1 else np.zeros_like(x)

    return OperatorOracle(M.shape[0], _MAX_ORDER, lambda x: M @ x, deriv, dict(lipschitz))


def _as_matrix(B) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    if B.ndim == 0:
        B = B.reshape(1, 1)
    if B.ndim != 2 or not np.all(np.isfinite(B)):
        raise ValueError("coupling must be a finite matrix")
    return B


# ---------------------------------------------------------------------------
# monotone zoo


def make_bilinear_saddle(B=1.0, rho: float = 1.0) -> VIProblem:
    """``min_z max_y z^T B y`` over ``[-rho, rho]`` boxes; ``F = (B y, -B^T z)``."""
    B = _as_matrix(B)
    dz, dy = B.shape
    M = np.block([[np.zeros((dz, dz)), B], [-B.T, np.zeros((dy, dy))]])
    normB = float(np.linalg.norm(B, 2))
    lip = {1: normB}
    lip.update({p: 0.0 for p in range(2, _MAX_ORDER + 2)})
    X = ProductSet([Box.cube(dz, rho), Box.cube(dy, rho)])
    zs, ys = X.slices
    saddle = SaddleStructure(
        zs, ys,
        f=lambda z, y: float(z @ B @ y),
        max_y=lambda z: rho * float(np.abs(B.T @ z).sum()),
        min_z=lambda y: -rho * float(np.abs(B @ y).sum()),
    )
    return VIProblem("bilinear", _linear_oracle(M, lip), X, Regularity("monotone"),
                     np.zeros(dz + dy), saddle, {"B": B, "rho": rho})


def _clip_root(coef, c, rho):
    # argmax over [-rho, rho] of coef * u - c u^4 / 4
    if c == 0.0:
        return np.where(coef >= 0, rho, -rho)
    return np.clip(np.cbrt(coef / c), -rho, rho)


def make_cubic_bilinear(B=1.0, cubic: float = 1.0, rho: float = 1.0) -> VIProblem:
    """``f(z, y) = z^T B y + (c/4) |z|_4^4 - (c/4) |y|_4^4`` on ``[-rho, rho]`` boxes.

    ``F = (B y + c z^3, -B^T z + c y^3)`` is monotone with a Lipschitz Jacobian
    (constant ``6 c rho``) and has the saddle point 0. Both inner problems of
    the gap separate per coordinate and are solved by clipped cube roots.
    """
    B = _as_matrix(B)
    c = float(cubic)
    if c < 0:
        raise ValueError("cubic coefficient must be nonnegative")
    dz, dy = B.shape
    M = np.block([[np.zeros((dz, dz)), B], [-B.T, np.zeros((dy, dy))]])
    normB = float(np.linalg.norm(B, 2))

    def F(x):
        return M @ x + c * x ** 3

    def deriv(x, k, h):
        if k == 1:
            return M @ h + 3 * c * x ** 2 * h
        return c * _power_deriv(x, h, 3, k)

    lip = {1: normB + 3 * c * rho ** 2, 2: 6 * c * rho, 3: 6 * c}
    lip.update({p: 0.0 for p in range(4, _MAX_ORDER + 2)})
    oracle = OperatorOracle(dz + dy, _MAX_ORDER, F, deriv, lip)
    X = ProductSet([Box.cube(dz, rho), Box.cube(dy, rho)])
    zs, ys = X.slices

    def f(z, y):
        return float(z @ B @ y + 0.25 * c * (z ** 4).sum() - 0.25 * c * (y ** 4).sum())

    def max_y(z):
        b = B.T @ z
        y = _clip_root(b, c, rho)
        return float(z @ B @ y + 0.25 * c * (z ** 4).sum() - 0.25 * c * (y ** 4).sum())

    def min_z(y):
        a = B @ y
        z = _clip_root(-a, c, rho)
        return f(z, y)

    saddle = SaddleStructure(zs, ys, f, max_y, min_z)
    return VIProblem("cubic-bilinear", oracle, X, Regularity("monotone"), np.zeros(dz + dy), saddle,
                     {"B": B, "cubic": c, "rho": rho})


def skew_matrix(dim: int) -> np.ndarray:
    """Block-diagonal skew matrix with ``[[0, 1], [-1, 0]]`` blocks (odd tail is zero)."""
    J = np.zeros((dim, dim))
    for i in range(0, dim - 1, 2):
        J[i, i + 1] = 1.0
        J[i + 1, i] = -1.0
    return J


def make_strongly_monotone(mu: float = 1.0, a: float = 0.0, dim: int = 2, radius: float = 1.0) -> VIProblem:
    """``F(x) = mu x + a J x`` on ``[-radius, radius]^dim``; solution 0."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    M = mu * np.eye(dim) + a * skew_matrix(dim)
    lip = {1: float(np.linalg.norm(M, 2))}
    lip.update({p: 0.0 for p in range(2, _MAX_ORDER + 2)})
    X = Box.cube(dim, radius)
    return VIProblem("strongly-monotone", _linear_oracle(M, lip), X,
                     Regularity("strongly_monotone", mu), np.zeros(dim),
                     metadata={"mu": mu, "a": a})


def make_zero(dim: int = 2, radius: float = 1.0) -> VIProblem:
    lip = {p: 0.0 for p in range(1, _MAX_ORDER + 2)}
    X = Box.cube(dim, radius)
    oracle = OperatorOracle(dim, _MAX_ORDER, lambda x: np.zeros_like(x),
                            lambda x, k, h: np.zeros_like(x), lip)
    return VIProblem("zero", oracle, X, Regularity("monotone"), np.zeros(dim))


# ---------------------------------------------------------------------------
# Minty zoo


def make_minty_scalar() -> VIProblem:
    """``F(x) = x (x - 1)^2`` on ``[0, 2]``.

    Not monotone (``F`` decreases on ``(1/3, 1)``) but ``<F(x), x> = x^2 (x-1)^2``
    is nonnegative, so ``x* = 0`` satisfies the Minty condition.
    Derivative bounds on ``[0, 2]``: ``|F'| <= 5``, ``|F''| <= 8``, ``F''' = 6``.
    """
    coeffs = np.array([1.0, -2.0, 1.0, 0.0])  # x^3 - 2x^2 + x

    def deriv(x, k, h):
        return np.polyval(np.polyder(coeffs, k), x) * h ** k

    lip = {1: 5.0, 2: 8.0, 3: 6.0}
    lip.update({p: 0.0 for p in range(4, _MAX_ORDER + 2)})
    oracle = OperatorOracle(1, _MAX_ORDER, lambda x: np.polyval(coeffs, x), deriv, lip)
    return VIProblem("minty-scalar", oracle, Box([0.0], [2.0]), Regularity("minty"), np.zeros(1))


def strong_minty_bound(mu: float, omega: float, p: int) -> float:
    """Upper bound on ``sup_{|x| <= 1} |F^(p)(x)|`` for the strong-Minty example."""
    return mu * (2.0 * (p == 1) + omega ** p + p * omega ** (p - 1))


def make_strong_minty(mu: float = 1.0, omega: float = 1.0) -> VIProblem:
    """``F(x) = mu x (2 + sin(omega x))`` on ``[-1, 1]``.

    ``<F(x), x> = mu x^2 (2 + sin(omega x)) >= mu x^2`` gives the strong Minty
    condition at 0. For large ``omega`` the operator is not monotone.
    """
    if mu <= 0 or omega < 0:
        raise ValueError("need mu > 0 and omega >= 0")

    def F(x):
        return mu * x * (2.0 + np.sin(omega * x))

    def kth(x, k):
        # d^k [x sin(wx)] = x w^k sin(wx + k pi/2) + k w^(k-1) sin(wx + (k-1) pi/2)
        val = x * omega ** k * np.sin(omega * x + k * np.pi / 2)
        val = val + k * omega ** (k - 1) * np.sin(omega * x + (k - 1) * np.pi / 2)
        if k == 1:
            val = val + 2.0
        return mu * val

    lip = {p: strong_minty_bound(mu, omega, p) for p in range(1, _MAX_ORDER + 2)}
    oracle = OperatorOracle(1, _MAX_ORDER, F, lambda x, k, h: kth(x, k) * h ** k, lip)
    grid = np.linspace(-1, 1, 2001)
    est = {p: float(np.max(np.abs(kth(grid, p)))) for p in range(1, 5)}
    return VIProblem("strong-minty", oracle, Box([-1.0], [1.0]), Regularity("strong_minty", mu),
                     np.zeros(1), metadata={"mu": mu, "omega": omega, "lipschitz_grid_estimate": est})


# ---------------------------------------------------------------------------
# lower-bound hard instance


@dataclass(frozen=True)
class HardInstanceSpec:
    """Parameters of the lower-bound saddle problem.

    ``coordinates="native_z"`` keeps the original z variable and its coupled
    polyhedral set; ``"box_w"`` substitutes ``w = A z`` so the z-block becomes
    the box ``[0, 1]^(2T)``.
    """

    p: int = 2
    T: int = 1
    L: float = 1.0
    d: Optional[int] = None
    coordinates: str = "native_z"

    def __post_init__(self):
        if self.p < 2:
            raise InvalidSpec("hard instance needs p >= 2")
        if self.T < 1:
            raise InvalidSpec("T must be >= 1")
        if not self.L > 0:
            raise InvalidSpec("L must be positive")
        if self.d is not None and self.d < 2 * self.T + 1:
            raise InvalidSpec(f"d={self.d} must be >= 2T+1={2 * self.T + 1}")
        if self.coordinates not in ("native_z", "box_w"):
            raise InvalidSpec(f"unknown coordinates {self.coordinates!r}")

    @property
    def dim(self) -> int:
        return 2 * self.T + 1 if self.d is None else self.d

    @property
    def scale(self) -> float:
        """``L / (2^(p+1) p!)``."""
        return self.L / (2 ** (self.p + 1) * math.factorial(self.p))

    @property
    def box_lipschitz(self) -> float:
        """Smoothness bound of the operator in ``w`` coordinates.

        Each coordinate pair ``(w_i, y_i)`` contributes ``(p+1)!/p |a|^p |b| +
        (p-1)! |b|^(p+1)`` to the ``(p+1)``-th derivative of the saddle
        function, which is at most ``(p+2)(p-1)!`` on the unit sphere.
        """
        return self.scale * (self.p + 2) * math.factorial(self.p - 1)


def _hard_matrix(T: int, d: int) -> np.ndarray:
    A = np.eye(d)
    for i in range(2 * T - 1):
        A[i, i + 1] = -1.0
    return A


def hard_instance_value(spec: HardInstanceSpec, z, y) -> float:
    """Saddle function ``f(z, y)`` in native coordinates."""
    p, T, c = spec.p, spec.T, spec.scale
    z, y = np.asarray(z, dtype=float), np.asarray(y, dtype=float)
    w = _hard_matrix(T, spec.dim) @ z
    eta = float(np.sum(w ** p * y)) / p
    tail = float(np.sum(y[1:2 * T] ** (p + 1))) / (p * (p + 1))
    return c * (eta - tail - (z[0] - 2 * T + 1.0 / p) * y[0])


def hard_instance_optimal_value(spec: HardInstanceSpec) -> float:
    """``L (2T - 1) / (2^(p+1) (p+1)!)``."""
    return spec.L * (2 * spec.T - 1) / (2 ** (spec.p + 1) * math.factorial(spec.p + 1))


def _hard_max_y(spec: HardInstanceSpec, w: np.ndarray) -> float:
    """``max_y f`` for given ``w = A z``; separable over the coordinates of y."""
    p, T, c = spec.p, spec.T, spec.scale
    z1 = float(w[:2 * T].sum())
    first = max(0.0, w[0] ** p / p - (z1 - 2 * T + 1.0 / p))
    a = w[1:2 * T] ** p / p
    # maximize a u - u^(p+1) / (p (p+1)) over u in [0, 1]
    u = np.clip(np.maximum(p * a, 0.0) ** (1.0 / p), 0.0, 1.0)
    rest = np.where(a > 0, a * u - u ** (p + 1) / (p * (p + 1)), 0.0)
    return c * (first + float(rest.sum()))


def _hard_min_w(spec: HardInstanceSpec, y: np.ndarray) -> float:
    """``min_z f`` for fixed y, written over ``w = A z`` in ``[0, 1]^(2T)``."""
    p, T, c = spec.p, spec.T, spec.scale
    yb = y[:2 * T]
    y1 = yb[0]
    const = -float(np.sum(yb[1:] ** (p + 1))) / (p * (p + 1)) + (2 * T - 1.0 / p) * y1
    total = const
    for yi in yb:
        # convex in u for yi >= 0: minimize yi u^p / p - y1 u over u in [0, 1]
        cands = [0.0, 1.0]
        if yi > 0 and y1 > 0:
            cands.append(min(1.0, (y1 / yi) ** (1.0 / (p - 1))))
        total += min(yi * u ** p / p - y1 * u for u in cands)
    return c * total


@dataclass
class _HardParts:
    A: np.ndarray
    mask_tail: np.ndarray  # indicator of coordinates 2..2T
    mask_block: np.ndarray  # indicator of coordinates 1..2T


def _hard_parts(spec: HardInstanceSpec) -> _HardParts:
    d, T = spec.dim, spec.T
    block = np.zeros(d)
    block[:2 * T] = 1.0
    tail = block.copy()
    tail[0] = 0.0
    return _HardParts(_hard_matrix(T, d), tail, block)


def _hard_oracle_native(spec: HardInstanceSpec) -> OperatorOracle:
    p, T, c, d = spec.p, spec.T, spec.scale, spec.dim
    parts = _hard_parts(spec)
    A, tail = parts.A, parts.mask_tail
    e1 = np.zeros(d)
    e1[0] = 1.0

    def F(x):
        z, y = x[:d], x[d:]
        w = A @ z
        Fz = A.T @ (w ** (p - 1) * y) - y[0] * e1
        Fy = -(w ** p / p - tail * y ** p / p - (z[0] - 2 * T + 1.0 / p) * e1)
        return c * np.concatenate([Fz, Fy])

    def deriv(x, k, h):
        z, y = x[:d], x[d:]
        hz, hy = h[:d], h[d:]
        w, hw = A @ z, A @ hz
        Dz = A.T @ _product_deriv(w, hw, p - 1, y, hy, 1, k)
        Dy = -(_power_deriv(w, hw, p, k) / p - tail * _power_deriv(y, hy, p, k) / p)
        if k == 1:
            Dz = Dz - hy[0] * e1
            Dy = Dy + hz[0] * e1
        return c * np.concatenate([Dz, Dy])

    lip = {p: spec.L}
    return OperatorOracle(2 * d, _MAX_ORDER, F, deriv, lip)


def _hard_oracle_box(spec: HardInstanceSpec) -> OperatorOracle:
    p, T, c, d = spec.p, spec.T, spec.scale, spec.dim
    parts = _hard_parts(spec)
    tail, block = parts.mask_tail, parts.mask_block
    e1 = np.zeros(d)
    e1[0] = 1.0

    def F(x):
        w, y = x[:d], x[d:]
        z1 = float(w @ block)
        Gw = w ** (p - 1) * y - y[0] * block
        Gy = -(w ** p / p - tail * y ** p / p - (z1 - 2 * T + 1.0 / p) * e1)
        return c * np.concatenate([Gw, Gy])

    def deriv(x, k, h):
        w, y = x[:d], x[d:]
        hw, hy = h[:d], h[d:]
        Dw = _product_deriv(w, hw, p - 1, y, hy, 1, k)
        Dy = -(_power_deriv(w, hw, p, k) / p - tail * _power_deriv(y, hy, p, k) / p)
        if k == 1:
            Dw = Dw - hy[0] * block
            Dy = Dy + float(hw @ block) * e1
        return c * np.concatenate([Dw, Dy])

    return OperatorOracle(2 * d, _MAX_ORDER, F, deriv, {p: spec.box_lipschitz})


def _native_z_set(spec: HardInstanceSpec) -> PolyhedralSet:
    d, T = spec.dim, spec.T
    A = _hard_matrix(T, d)
    # 0 <= z_i - z_{i+1} <= 1 for i = 1..2T (z_{2T+1} is fixed to 0 below)
    D = np.zeros((2 * T, d))
    for i in range(2 * T):
        D[i, i] = 1.0
        D[i, i + 1] = -1.0
    A_ub = np.vstack([D, -D])
    b_ub = np.concatenate([np.ones(2 * T), np.zeros(2 * T)])
    A_eq = np.eye(d)[2 * T:]
    b_eq = np.zeros(d - 2 * T)
    diam = math.sqrt(sum(i * i for i in range(1, 2 * T + 1)))
    Ainv = np.linalg.inv(A)

    def sampler(rng, n):
        W = np.zeros((n, d))
        W[:, :2 * T] = rng.uniform(size=(n, 2 * T))
        return W @ Ainv.T

    return PolyhedralSet(A_ub, b_ub, diam, A_eq, b_eq, sampler=sampler)


def make_hard_instance(spec: HardInstanceSpec) -> VIProblem:
    """The convex-concave lower-bound instance as a monotone VI in ``x = (z, y)``.

    ``F = (grad_z f, -grad_y f)`` is taken from ``f`` itself (scale
    ``L / (2^(p+1) p!)``), so that ``F(x*) = 0`` and ``f(x*)`` agree.
    """
    d, T, p = spec.dim, spec.T, spec.p
    parts = _hard_parts(spec)
    ybox = Box(np.zeros(d), parts.mask_block)
    z_star = np.where(np.arange(d) < 2 * T, 2 * T - np.arange(d), 0.0).astype(float)
    y_star = parts.mask_block.copy()
    meta = {
        "spec": spec,
        "x0": np.zeros(2 * d),
        "reference_diameters": {"Z": 4 * T ** 1.5, "Y": 2 * math.sqrt(T)},
        "optimal_value": hard_instance_optimal_value(spec),
        "lipschitz_kind": "native" if spec.coordinates == "native_z" else "box_w",
    }
    if spec.coordinates == "native_z":
        oracle = _hard_oracle_native(spec)
        X = ProductSet([_native_z_set(spec), ybox])
        x_star = np.concatenate([z_star, y_star])
        A = parts.A
        to_w = lambda z: A @ z  # noqa: E731
        f = lambda z, y: hard_instance_value(spec, z, y)  # noqa: E731
    else:
        oracle = _hard_oracle_box(spec)
        X = ProductSet([Box(np.zeros(d), parts.mask_block), ybox])
        x_star = np.concatenate([parts.mask_block, y_star])
        Ainv = np.linalg.inv(parts.A)
        to_w = lambda w: w  # noqa: E731
        f = lambda w, y: hard_instance_value(spec, Ainv @ w, y)  # noqa: E731
    zs, ys = X.slices
    saddle = SaddleStructure(zs, ys, f, lambda z: _hard_max_y(spec, to_w(z)),
                             lambda y: _hard_min_w(spec, y))
    name = "hard-instance" if spec.coordinates == "native_z" else "hard-instance-box"
    return VIProblem(name, oracle, X, Regularity("monotone"), x_star, saddle, meta)


@dataclass
class HardInstanceReport:
    spec: HardInstanceSpec
    F_star_inf_norm: float
    value_error: float
    optimal_value: float
    smoothness_estimate: float
    monotone_min: float
    monotone_violated: bool
    restricted_value: float
    restricted_grid_value: float

    @property
    def passed(self) -> bool:
        return (self.F_star_inf_norm <= 1e-12 and self.value_error <= 1e-12
                and self.smoothness_estimate <= self.spec.L * (1 + 1e-6)
                and not self.monotone_violated
                and abs(self.restricted_value - self.restricted_grid_value) <= 1e-6)


def _grid_min(fn, step: float = 1e-4) -> float:
    grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    return float(np.min(fn(grid)))


def restricted_minmax_value(spec: HardInstanceSpec, step: float = 1e-4, tol: float = 1e-6) -> float:
    """``min over the first T coordinates of z, max over y, of f``.

    Returns the closed form ``L/(2^(p+1) p!) (T + (T-1)/(p+1))`` after checking
    it against a grid minimization of the separable reduction in ``w``.
    """
    closed = spec.scale * (spec.T + (spec.T - 1) / (spec.p + 1))
    grid_val = _restricted_grid(spec, step)
    if abs(grid_val - closed) > tol:
        raise BruteForceMismatch(f"grid value {grid_val} vs closed form {closed}")
    return closed


def _restricted_grid(spec: HardInstanceSpec, step: float = 1e-4) -> float:
    p, T, c = spec.p, spec.T, spec.scale
    first = _grid_min(lambda u: u ** p / p - u, step)
    rest = _grid_min(lambda u: u ** (p + 1) / (p + 1) - u, step)
    return c * (2 * T - 1.0 / p + first + (T - 1) * rest)


def validate_hard_instance(spec: HardInstanceSpec, n_pairs: int = 64,
                           rng: Optional[np.random.Generator] = None) -> HardInstanceReport:
    """Optimality, optimal value, sampled smoothness and monotonicity of the instance.

    Always evaluated in native coordinates, where ``L`` is the claimed constant.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    native = HardInstanceSpec(spec.p, spec.T, spec.L, spec.d, "native_z")
    prob = make_hard_instance(native)
    x_star = prob.known_solution
    d = native.dim
    f_star = hard_instance_value(native, x_star[:d], x_star[d:])
    opt = hard_instance_optimal_value(native)
    P = prob.set.sample(rng, 2 * n_pairs)
    pairs = list(zip(P[:n_pairs], P[n_pairs:]))
    smooth = estimate_smoothness(prob.oracle, native.p - 1, pairs, rng=rng)
    mono = check_monotone(prob.oracle, pairs)
    return HardInstanceReport(
        spec=native,
        F_star_inf_norm=float(np.max(np.abs(prob.F(x_star)))),
        value_error=abs(f_star - opt),
        optimal_value=opt,
        smoothness_estimate=smooth,
        monotone_min=mono.min_inner_product,
        monotone_violated=mono.violated,
        restricted_value=native.scale * (native.T + (native.T - 1) / (native.p + 1)),
        restricted_grid_value=_restricted_grid(native),
    )


def zero_chain_profile(spec: HardInstanceSpec, iterates) -> list:
    """Largest magnitude among coordinates with index > 2k at iteration k (1-based).

    Both the w and y blocks are inspected; iterates are in ``box_w``
    coordinates. This is a diagnostic of the coordinate-support chain, not a
    guarantee for projection-based methods.
    """
    d = spec.dim
    out = []
    for k, x in enumerate(iterates, start=1):
        w, y = np.asarray(x[:d]), np.asarray(x[d:])
        cut = min(2 * k, d)
        out.append(float(max(np.max(np.abs(w[cut:]), initial=0.0), np.max(np.abs(y[cut:]), initial=0.0))))
    return out


# ---------------------------------------------------------------------------
# registry used by the CLI


def _parse_matrix(text) -> np.ndarray:
    """``"1"`` or ``"1,0;0,2"`` (rows separated by ';')."""
    if not isinstance(text, str):
        return _as_matrix(text)
    rows = [r for r in text.split(";") if r.strip()]
    return _as_matrix([[float(v) for v in r.split(",")] for r in rows])


def _hard_from_params(p=2, T=1, L=1.0, d=None, coordinates="native_z"):
    return make_hard_instance(HardInstanceSpec(int(p), int(T), float(L),
                                               None if d in (None, "") else int(d), str(coordinates)))


@dataclass(frozen=True)
class ProblemEntry:
    build: Callable[..., VIProblem]
    params: Dict[str, Callable] = field(default_factory=dict)


PROBLEMS: Dict[str, ProblemEntry] = {
    "bilinear": ProblemEntry(lambda B=1.0, rho=1.0: make_bilinear_saddle(B, rho),
                             {"B": _parse_matrix, "rho": float}),
    "cubic-bilinear": ProblemEntry(lambda B=1.0, cubic=1.0, rho=1.0: make_cubic_bilinear(B, cubic, rho),
                                   {"B": _parse_matrix, "cubic": float, "rho": float}),
    "strongly-monotone": ProblemEntry(make_strongly_monotone,
                                      {"mu": float, "a": float, "dim": int, "radius": float}),
    "minty-scalar": ProblemEntry(make_minty_scalar, {}),
    "strong-minty": ProblemEntry(make_strong_minty, {"mu": float, "omega": float}),
    "zero": ProblemEntry(make_zero, {"dim": int, "radius": float}),
    "hard-instance": ProblemEntry(_hard_from_params,
                                  {"p": int, "T": int, "L": float, "d": int, "coordinates": str}),
}


def build_problem(name: str, params: Optional[Mapping[str, object]] = None) -> VIProblem:
    """Construct a registered problem; string parameter values are converted."""
    if name not in PROBLEMS:
        raise UnknownProblem(f"unknown problem {name!r}; known: {', '.join(sorted(PROBLEMS))}")
    entry = PROBLEMS[name]
    kwargs = {}
    for key, val in (params or {}).items():
        if key not in entry.params:
            raise ValueError(f"problem {name!r} has no parameter {key!r}")
        kwargs[key] = entry.params[key](val) if isinstance(val, str) else val
    return entry.build(**kwargs)

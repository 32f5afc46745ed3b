import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from perseus_vi.sets import Ball, Box, PolyhedralSet, ProductSet, Simplex

finite = st.floats(-20, 20, allow_nan=False, allow_infinity=False)


def _sets():
    return [
        Box([-1.0, 0.0, 2.0], [1.0, 3.0, 2.5]),
        Ball([0.5, -0.5, 0.0], 2.0),
        Simplex(3, 2.0),
        ProductSet([Box([-1.0], [1.0]), Ball([0.0, 0.0], 1.0)]),
        PolyhedralSet([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1], [1, 1, 1]],
                      [1, 1, 1, 1, 1, 1, 1.5], diameter=2 * np.sqrt(3)),
    ]


class TestBox:
    def test_projection_clips(self):
        X = Box.cube(2)
        np.testing.assert_array_equal(X.project([2.0, 0.5]), [1.0, 0.5])

    def test_lmo_picks_corner(self):
        X = Box.cube(2)
        np.testing.assert_array_equal(X.lmo(np.array([1.0, -1.0])), [1.0, -1.0])

    def test_diameter(self):
        assert Box.cube(2).diameter == pytest.approx(2 * np.sqrt(2))

    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            Box([1.0], [0.0])


class TestBall:
    def test_radial_projection(self):
        np.testing.assert_allclose(Ball([0.0, 0.0], 1.0).project([3.0, 4.0]), [0.6, 0.8])

    def test_interior_point_unchanged(self):
        np.testing.assert_array_equal(Ball([0.0, 0.0], 1.0).project([0.1, 0.2]), [0.1, 0.2])

    def test_lmo(self):
        np.testing.assert_allclose(Ball([0.0, 0.0], 2.0).lmo(np.array([3.0, 4.0])), [1.2, 1.6])


class TestSimplex:
    def test_projection_of_uniform_shift(self):
        np.testing.assert_allclose(Simplex(3).project([1.0, 1.0, 1.0]), [1 / 3] * 3)

    def test_projection_matches_sort_free_oracle(self, rng):
        # compare against a bisection on the threshold tau in sum(max(y - tau, 0)) = 1
        X = Simplex(5)
        for _ in range(20):
            y = rng.normal(size=5) * 3
            lo, hi = y.min() - 1, y.max()
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if np.maximum(y - mid, 0).sum() > 1:
                    lo = mid
                else:
                    hi = mid
            np.testing.assert_allclose(X.project(y), np.maximum(y - lo, 0), atol=1e-9)

    def test_lmo_vertex(self):
        np.testing.assert_array_equal(Simplex(3, 2.0).lmo(np.array([0.0, 5.0, 1.0])), [0.0, 2.0, 0.0])


class TestPolyhedral:
    def test_dykstra_matches_box_projection(self, rng):
        X = PolyhedralSet(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4), diameter=2 * np.sqrt(2))
        for y in rng.normal(size=(10, 2)) * 3:
            np.testing.assert_allclose(X.project(y), np.clip(y, -1, 1), atol=1e-8)

    def test_coupled_constraint_matches_qp(self, rng):
        from scipy.optimize import minimize

        X = _sets()[4]
        for y in rng.normal(size=(5, 3)) * 2:
            cons = [{"type": "ineq", "fun": lambda x, a=a, b=b: b - a @ x} for a, b in zip(X.A_ub, X.b_ub)]
            ref = minimize(lambda x: 0.5 * np.sum((x - y) ** 2), np.zeros(3), constraints=cons,
                           method="SLSQP", options={"ftol": 1e-14, "maxiter": 500}).x
            np.testing.assert_allclose(X.project(y), ref, atol=1e-6)


@pytest.mark.parametrize("X", _sets(), ids=lambda s: type(s).__name__)
class TestSetProperties:
    @settings(max_examples=40, deadline=None)
    @given(y=arrays(float, 3, elements=finite))
    def test_projection_characterization(self, X, y):
        # <y - P(y), x - P(y)> <= 0 for every x in X
        Py = X.project(y)
        assert X.contains(Py, 1e-7)
        for x in X.sample(np.random.default_rng(0), 25):
            assert (y - Py) @ (x - Py) <= 1e-7 * (1 + np.linalg.norm(y))

    @settings(max_examples=30, deadline=None)
    @given(c=arrays(float, 3, elements=finite))
    def test_lmo_beats_samples(self, X, c):
        best = c @ X.lmo(c)
        pts = X.sample(np.random.default_rng(1), 50)
        assert np.all(pts @ c <= best + 1e-7 * (1 + np.abs(best)))

    def test_samples_are_members(self, X, rng):
        assert all(X.contains(x, 1e-8) for x in X.sample(rng, 30))


def test_lmo_exhaustive_on_box_vertices(rng):
    X = Box([-1.0, 0.0, 2.0], [1.0, 3.0, 2.5])
    verts = [np.array(v) for v in itertools.product([-1, 1], [0, 3], [2, 2.5])]
    for c in rng.normal(size=(20, 3)):
        assert c @ X.lmo(c) == pytest.approx(max(c @ v for v in verts))


def test_lmo_exhaustive_on_simplex_vertices(rng):
    X = Simplex(3, 2.0)
    for c in rng.normal(size=(20, 3)):
        assert c @ X.lmo(c) == pytest.approx(2.0 * c.max())


def test_product_slices_and_diameter():
    X = ProductSet([Box([-1.0], [1.0]), Ball([0.0, 0.0], 1.0)])
    assert X.dim == 3
    assert X.diameter == pytest.approx(np.sqrt(4 + 4))


def test_dykstra_does_not_stop_on_a_repeated_sweep():
    # the iterate repeats between the first two sweeps although the corrections have not settled
    X = _sets()[4]
    np.testing.assert_allclose(X.project(np.array([3.0, 2.0, 3.0])), [5 / 6, -1 / 6, 5 / 6], atol=1e-8)

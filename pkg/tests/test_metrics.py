import itertools

import numpy as np
import pytest

from perseus_vi.core import OperatorOracle, VIProblem
from perseus_vi.errors import EmptyCertificateSet, NoSaddleStructure, NotInSet
from perseus_vi.metrics import evaluate, gap, gap_saddle, residue, restricted_gap
from perseus_vi.problems import (HardInstanceSpec, make_bilinear_saddle, make_cubic_bilinear, make_hard_instance,
                                 make_minty_scalar)
from perseus_vi.sets import Box


def _const_problem(c):
    o = OperatorOracle(2, 0, lambda x: np.asarray(c, dtype=float))
    return VIProblem("const", o, Box.cube(2))


class TestResidue:
    def test_zero_operator(self):
        assert residue(_const_problem([0.0, 0.0]), np.zeros(2)) == 0.0

    def test_lmo_arithmetic(self):
        assert residue(_const_problem([1.0, -1.0]), np.zeros(2)) == pytest.approx(2.0)

    def test_minty_solution(self):
        assert residue(make_minty_scalar(), np.zeros(1)) == 0.0

    def test_outside(self):
        with pytest.raises(NotInSet):
            residue(_const_problem([1.0, 0.0]), np.array([5.0, 0.0]))


class TestGap:
    def test_saddle_point(self):
        assert gap(make_bilinear_saddle(), np.zeros(2)) == 0.0

    def test_off_saddle(self):
        assert gap(make_bilinear_saddle(), np.array([1.0, 0.0])) == pytest.approx(1.0)
        assert gap_saddle(make_bilinear_saddle(), np.array([1.0]), np.array([0.0])) == pytest.approx(1.0)

    @pytest.mark.parametrize("coords", ["native_z", "box_w"])
    def test_hard_instance_solution(self, coords):
        prob = make_hard_instance(HardInstanceSpec(2, 2, 1.0, coordinates=coords))
        assert abs(gap(prob, prob.known_solution)) <= 1e-9

    def test_no_saddle(self):
        with pytest.raises(NoSaddleStructure):
            gap(make_minty_scalar(), np.zeros(1))

    def test_cubic_gap_matches_grid(self, rng):
        prob = make_cubic_bilinear(cubic=0.5)
        grid = np.linspace(-1, 1, 4001)
        f = lambda z, y: z * y + 0.5 * (z ** 4 / 4 - y ** 4 / 4)  # noqa: E731
        for z, y in rng.uniform(-1, 1, (5, 2)):
            ref = np.max(f(z, grid)) - np.min(f(grid, y))
            assert gap(prob, np.array([z, y])) == pytest.approx(ref, abs=1e-6)


class TestRestrictedGap:
    def test_self_point(self):
        x = np.array([0.3, 0.4])
        assert restricted_gap(make_bilinear_saddle(), x, [x]) == 0.0

    def test_corners(self):
        corners = [np.array(c, dtype=float) for c in itertools.product([-1, 1], repeat=2)]
        assert restricted_gap(make_bilinear_saddle(), np.array([1.0, 0.0]), corners) == pytest.approx(1.0)

    def test_lower_bounds_gap(self, rng):
        prob = make_cubic_bilinear()
        for x in rng.uniform(-1, 1, (10, 2)):
            pts = list(rng.uniform(-1, 1, (20, 2)))
            assert restricted_gap(prob, x, pts) <= gap(prob, x) + 1e-12

    def test_empty(self):
        with pytest.raises(EmptyCertificateSet):
            restricted_gap(make_bilinear_saddle(), np.zeros(2), [])


def test_evaluate_report():
    rep = evaluate(make_bilinear_saddle(), np.array([1.0, 0.0]))
    assert rep.gap == pytest.approx(1.0)
    assert rep.dist_to_solution == pytest.approx(1.0)
    assert rep.restricted_gap == pytest.approx(1.0)

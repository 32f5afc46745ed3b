import numpy as np
import pytest
from scipy.optimize import brentq

from perseus_vi.core import OperatorOracle
from perseus_vi.errors import BudgetExhausted, NotInSet
from perseus_vi.problems import HardInstanceSpec, make_cubic_bilinear, make_hard_instance
from perseus_vi.sets import Box
from perseus_vi.subsolver import certificate_threshold, model_residue, solve_subproblem
from perseus_vi.taylor import build_model

from conftest import identity_problem


def _const_model(c, dim=2):
    o = OperatorOracle(dim, 8, lambda x: np.asarray(c, dtype=float), lambda x, k, h: np.zeros(dim), {1: 1.0})
    return build_model(o, np.zeros(dim), 1, 1.0)


class TestModelResidue:
    def test_zero_functional(self):
        m = build_model(OperatorOracle(2, 8, lambda x: np.zeros(2), lambda x, k, h: np.zeros(2), {1: 1.0}),
                        np.zeros(2), 1, 1.0)
        assert model_residue(m, np.zeros(2), Box.cube(2)) == 0.0

    def test_box_lmo_arithmetic(self):
        # F_v(0) = (1, -1): sup <(1,-1), 0 - x> over the box is 2
        assert model_residue(_const_model([1.0, -1.0]), np.zeros(2), Box.cube(2)) == pytest.approx(2.0)

    def test_outside_set(self):
        with pytest.raises(NotInSet):
            model_residue(_const_model([1.0, -1.0]), np.array([3.0, 0.0]), Box.cube(2))


class TestClosedForm:
    def test_interior(self):
        prob = identity_problem()
        cert = solve_subproblem(build_model(prob.oracle, [0.5], 1, 1.0), prob.set)
        assert cert.candidate[0] == pytest.approx(0.4)
        assert cert.model_residue == pytest.approx(0.0, abs=1e-15)
        assert cert.certified

    def test_boundary(self):
        prob = identity_problem(0.45, 1.0)
        cert = solve_subproblem(build_model(prob.oracle, [0.5], 1, 1.0), prob.set)
        assert cert.candidate[0] == pytest.approx(0.45)
        assert cert.model_residue == 0.0 and cert.certified


class TestSecondOrder:
    def test_scalar_identity_against_bisection(self):
        prob = identity_problem()
        m = build_model(prob.oracle, [0.5], 2, 1.0)
        cert = solve_subproblem(m, prob.set)
        root = brentq(lambda t: m([t])[0], -1.0, 0.5, xtol=1e-15)
        x = cert.candidate[0]
        assert cert.certified
        assert abs(cert.model_residue) <= 0.5 * abs(x - 0.5) ** 3 * (1 + 1e-9)
        # certification allows inexactness, so only closeness to the root is asserted
        assert x == pytest.approx(root, abs=1e-2)
        assert root == pytest.approx(0.5 - (np.sqrt(11) - 1) / 10)

    @pytest.mark.parametrize("p", [2, 3])
    def test_hard_instance_certificates(self, p, rng):
        prob = make_hard_instance(HardInstanceSpec(p, 1, 1.0, coordinates="box_w"))
        for v in prob.set.sample(rng, 5):
            m = build_model(prob.oracle, v, p, 1.0)
            cert = solve_subproblem(m, prob.set)
            assert cert.certified
            assert model_residue(m, cert.candidate, prob.set) <= certificate_threshold(m, cert.candidate) * (1 + 1e-9)

    def test_budget_exhausted_carries_best(self):
        prob = make_cubic_bilinear()
        m = build_model(prob.oracle, np.array([1.0, 1.0]), 2, 6.0)
        with pytest.raises(BudgetExhausted) as info:
            solve_subproblem(m, prob.set, budget=1)
        assert info.value.best is not None

    def test_bad_budget(self):
        prob = identity_problem()
        with pytest.raises(ValueError):
            solve_subproblem(build_model(prob.oracle, [0.5], 2, 1.0), prob.set, budget=0)


def test_certificate_ratio():
    prob = identity_problem()
    cert = solve_subproblem(build_model(prob.oracle, [0.5], 1, 1.0), prob.set)
    assert 0.0 <= cert.ratio <= 1.0

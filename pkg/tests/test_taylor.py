import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perseus_vi.errors import OrderUnavailable
from perseus_vi.problems import HardInstanceSpec, make_cubic_bilinear, make_hard_instance
from perseus_vi.taylor import REG_FACTOR, build_model, remainder_check

from conftest import identity_problem, scalar_poly_oracle


class TestModelValues:
    def test_first_order(self):
        m = build_model(identity_problem().oracle, [0.5], 1, 1.0)
        assert m([0.7])[0] == pytest.approx(1.5)

    def test_second_order(self):
        m = build_model(identity_problem().oracle, [0.0], 2, 1.0)
        assert m([0.2])[0] == pytest.approx(0.4)

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_center_returns_operator_value(self, p):
        prob = make_cubic_bilinear()
        v = np.array([0.3, -0.7])
        m = build_model(prob.oracle, v, p, prob.oracle.lipschitz_L(p))
        np.testing.assert_array_equal(m(v), prob.F(v))

    def test_regularization_coefficient(self):
        m = build_model(identity_problem().oracle, [0.0], 3, 2.0)
        assert m.reg_coefficient == pytest.approx(REG_FACTOR * 2.0 / math.factorial(2))

    def test_expansion_matches_direct_sum(self):
        # cubic F: the p=3 model's Taylor part equals F(v) + F'(v)h + F''(v)h^2/2
        o = scalar_poly_oracle([1.0, -2.0, 0.5, 1.0])
        v, x = 0.3, 0.9
        m = build_model(o, [v], 3, 6.0)
        h = x - v
        ref = np.polyval([1, -2, 0.5, 1], v) + np.polyval([3, -4, 0.5], v) * h + np.polyval([6, -4], v) * h * h / 2
        assert m.taylor_part([x])[0] == pytest.approx(ref)

    def test_order_unavailable(self):
        from perseus_vi.core import OperatorOracle
        o = OperatorOracle(1, 0, lambda x: x)
        with pytest.raises(OrderUnavailable):
            build_model(o, [0.0], 2, 1.0)


class TestRemainder:
    def test_polynomial_below_order_is_exact(self):
        o = scalar_poly_oracle([2.0, 1.0])  # degree 1 < p = 2
        m = build_model(o, [0.1], 2, 1.0)
        chk = remainder_check(o, m, [0.9])
        assert chk.lhs == pytest.approx(0.0, abs=1e-15) and chk.holds

    def test_square_equality_case(self):
        o = scalar_poly_oracle([1.0, 0.0, 0.0])
        m = build_model(o, [0.0], 2, 2.0)
        chk = remainder_check(o, m, [0.5])
        assert chk.lhs == pytest.approx(0.25) and chk.rhs == pytest.approx(0.25) and chk.holds

    def test_at_center(self):
        o = scalar_poly_oracle([1.0, 0.0, 0.0])
        chk = remainder_check(o, build_model(o, [0.3], 2, 2.0), [0.3])
        assert chk.lhs == 0.0 and chk.rhs == 0.0 and chk.holds

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 3), st.integers(0, 10_000))
    def test_hard_instance_remainder(self, p, seed):
        prob = make_hard_instance(HardInstanceSpec(p, 1, 1.0))
        rng = np.random.default_rng(seed)
        v, x = prob.set.sample(rng, 2)
        m = build_model(prob.oracle, v, p, 1.0)
        assert remainder_check(prob.oracle, m, x).holds


@pytest.mark.parametrize("p", [2, 3])
def test_derivatives_match_finite_differences(p, rng):
    prob = make_cubic_bilinear(B=np.array([[1.0, 2.0], [0.0, 1.0]]), cubic=0.7)
    for _ in range(5):
        x = rng.uniform(-1, 1, prob.dim)
        h = rng.normal(size=prob.dim)
        eps = 1e-3
        # central difference: sum_j (-1)^j C(k, j) F(x + (k - 2j) eps h) / (2 eps)^k
        k = p - 1
        fd = sum((-1) ** j * math.comb(k, j) * prob.F(x + (k - 2 * j) * eps * h)
                 for j in range(k + 1)) / (2 * eps) ** k
        exact = prob.oracle.deriv_apply(x, k, h)
        np.testing.assert_allclose(fd, exact, rtol=1e-5, atol=1e-5 * (1 + np.linalg.norm(exact)))

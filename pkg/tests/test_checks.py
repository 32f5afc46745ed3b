from dataclasses import replace

import numpy as np
import pytest

from perseus_vi.checks import (check_bracket, check_certificates, check_energy_inequality, check_half_distance_bound, check_step_length_sum,
                               check_step_size_sum, check_telescoping, step_size_sum_lower_bound, run_checks)
from perseus_vi.errors import NoKnownSolution
from perseus_vi.problems import (HardInstanceSpec, make_bilinear_saddle, make_cubic_bilinear, make_hard_instance,
                                 make_minty_scalar, make_strong_minty, make_strongly_monotone)
from perseus_vi.solver import SolverConfig, perseus_restart_run, perseus_run


def _run(prob, p, L, T, **kw):
    return perseus_run(prob, SolverConfig(p, L, T, **kw))


RUNS = {
    "bilinear-p1": lambda: (make_bilinear_saddle(), 1, 1.0, 100),
    "cubic-p2": lambda: (make_cubic_bilinear(), 2, 6.0, 40),
    "cubic-p3": lambda: (make_cubic_bilinear(), 3, 6.0, 20),
    "hard-box-p2": lambda: (make_hard_instance(HardInstanceSpec(2, 2, 1.0, coordinates="box_w")), 2,
                            HardInstanceSpec(2, 2, 1.0).box_lipschitz, 30),
    "strongly-monotone-p2": lambda: (make_strongly_monotone(1.0, 2.0), 2, 1.0, 20),
    "minty-p2": lambda: (make_minty_scalar(), 2, 8.0, 30),
    "strong-minty-p2": lambda: (make_strong_minty(1.0, 3.0), 2, make_strong_minty(1.0, 3.0).oracle.lipschitz_L(2), 30),
}


@pytest.mark.parametrize("name", sorted(RUNS))
def test_all_checks_hold(name):
    prob, p, L, T = RUNS[name]()
    res = _run(prob, p, L, T)
    checks = run_checks(prob, res)
    assert {"bracket", "telescoping", "lemma1", "lemma2a", "certificates"} <= set(checks)
    assert {"lemma2b", "lemma3"} <= set(checks)
    bad = {k: (v.lhs, v.rhs) for k, v in checks.items() if not v.holds}
    assert not bad


def test_bracket_detects_corrupted_step():
    prob = make_bilinear_saddle()
    res = _run(prob, 1, 1.0, 20, lambda_hook=lambda k, lam: 2 * lam if k == 7 else lam)
    chk = check_bracket(res)
    assert not chk.holds and "k=7" in chk.detail


def test_energy_inequality_detects_wrong_dual_state():
    prob = make_cubic_bilinear()
    res = _run(prob, 2, 6.0, 20)
    res.s_final = res.s_final + 5.0
    pts = list(prob.set.sample(np.random.default_rng(0), 20))
    assert not check_energy_inequality(prob, res, pts).holds


def test_telescoping_detects_tampering():
    prob = make_bilinear_saddle()
    res = _run(prob, 1, 1.0, 10)
    res.trace[4].s = res.trace[4].s + 1e-3
    assert not check_telescoping(res).holds


def test_certificates_detect_bad_iterate():
    prob = make_cubic_bilinear()
    res = _run(prob, 2, 6.0, 10)
    res.trace[3].x = prob.set.project(res.trace[3].x + 0.3)
    assert not check_certificates(prob, res).holds


def test_half_distance_includes_dual_maximizer():
    prob = make_cubic_bilinear()
    res = _run(prob, 2, 6.0, 30)
    chk = check_half_distance_bound(prob, res, [prob.known_solution])
    assert chk.holds and chk.lhs <= chk.rhs


def test_first_order_lower_bound_is_t_over_12l():
    assert step_size_sum_lower_bound(1, 2.0, 0.7, 48) == pytest.approx(48 / 24)


def test_step_size_sum_on_bilinear_is_tight_at_p1():
    prob = make_bilinear_saddle()
    res = _run(prob, 1, 1.0, 60)
    chk = check_step_size_sum(prob, res)
    assert chk.holds and chk.lhs == pytest.approx(chk.rhs)


def test_step_length_sum_requires_solution():
    prob = make_bilinear_saddle()
    res = _run(prob, 1, 1.0, 5)
    with pytest.raises(NoKnownSolution):
        check_step_length_sum(replace(prob, known_solution=None), res)


def test_restart_checks_each_epoch():
    prob = make_strongly_monotone(1.0, 2.0)
    res = perseus_restart_run(prob, 1, prob.oracle.lipschitz_L(1), 1.0, prob.set.diameter, 4, 0)
    checks = run_checks(prob, res)
    assert all(c.holds for c in checks.values())

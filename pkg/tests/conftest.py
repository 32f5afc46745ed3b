import numpy as np
import pytest

from perseus_vi.core import OperatorOracle, Regularity, VIProblem
from perseus_vi.sets import Box


def scalar_poly_oracle(coeffs, lipschitz=None):
    """Oracle for a scalar polynomial ``F`` given by numpy.polyval coefficients."""
    coeffs = np.asarray(coeffs, dtype=float)

    def F(x):
        return np.polyval(coeffs, x)

    def deriv(x, k, h):
        c = np.polyder(coeffs, k) if k < coeffs.size else np.zeros(1)
        return np.polyval(c, x) * h ** k

    return OperatorOracle(1, 8, F, deriv, lipschitz or {})


def identity_problem(lo=-1.0, hi=1.0, dim=1):
    oracle = OperatorOracle(dim, 8, lambda x: x.copy(),
                            lambda x, k, h: h.copy() if k == 1 else np.zeros(dim),
                            {1: 1.0, 2: 0.0, 3: 0.0})
    return VIProblem("identity", oracle, Box(lo * np.ones(dim), hi * np.ones(dim)),
                     Regularity("strongly_monotone", 1.0), np.zeros(dim))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = {}


def record_acceptance(key, passed, detail):
    line = f"{key} {'PASS' if passed else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES[key] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[1:])):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])

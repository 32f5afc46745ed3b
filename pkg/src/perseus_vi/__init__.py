"""High-order dual extrapolation (Perseus) for smooth variational inequalities."""

from .baselines import BaselineConfig, dual_extrapolation_run, extragradient_run
from .bench import RateFit, RunConfig, rate_fit
from .checks import run_checks
from .core import (OperatorOracle, Regularity, SaddleStructure, ToleranceSet, VIProblem,
                   check_monotone, estimate_smoothness, minty_margin)
from .errors import *  # noqa: F401,F403
from .metrics import evaluate, gap, gap_saddle, residue, restricted_gap
from .sets import Ball, Box, PolyhedralSet, ProductSet, Simplex
from .solver import (SolveResult, SolverConfig, Status, perseus_restart_run, perseus_run,
                     t_inner)
from .taylor import build_model

__version__ = "0.1.0"

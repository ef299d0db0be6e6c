"""Spectral homogenization of periodic elliptic operators on the torus."""

from .cell import CorrectorField, EffectiveMatrix, homogenize, solve_cell_problem
from .contour import build_contour, expm_contour, expm_spectral_A0, frak_c
from .errors import TorusHomError
from .norms import ErrorSuite, Problem, error_suite, op_norm, power_iteration
from .operators import (CoefficientField, EffectiveOperator, OscillatingOperator, Symbol,
                        apply_A0, apply_A_eps)
from .resolvent import ResolventSolver, c_of_phi, solve_resolvent_A0, solve_resolvent_A_eps
from .smoothing import Corrector, SmoothingMultiplier, apply_S_eps
from .spectral import TorusGrid

__all__ = [
    "CoefficientField", "Corrector", "CorrectorField", "EffectiveMatrix", "EffectiveOperator",
    "ErrorSuite", "OscillatingOperator", "Problem", "ResolventSolver", "SmoothingMultiplier",
    "Symbol", "TorusGrid", "TorusHomError", "apply_A0", "apply_A_eps", "apply_S_eps",
    "build_contour", "c_of_phi", "error_suite", "expm_contour", "expm_spectral_A0", "frak_c",
    "homogenize", "op_norm", "power_iteration", "solve_cell_problem", "solve_resolvent_A0",
    "solve_resolvent_A_eps",
]

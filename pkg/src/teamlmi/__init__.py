"""Optimal linear strategies for deterministic LQ team problems with signaling."""

from .corpus import multistage, multistage_dynamic, witsenhausen, witsenhausen_team
from .lift import DynamicProblem, lift_dynamic, simulate_dynamic
from .lmi import (
    AffineLMI,
    GammaMatrix,
    affine_basis,
    assemble_gamma_matrix,
    closed_loop_form,
    feasibility_margin,
    schur_lmi,
)
from .model import (
    AssumptionViolation,
    BlockGain,
    GammaFormProblem,
    IllPosedLoopError,
    InvalidProblemError,
    Partition,
    SolveReport,
    TeamProblem,
    as_gamma_form,
    gamma_bar,
    to_gamma_form,
    validate_problem,
)
from .oracle import (
    achieved_gamma,
    closed_loop_pencil,
    sample_ratio,
    sample_ratio_x,
    well_posed,
    worst_case_witness,
)
from .solver import SolverConfig, bisect_gamma, feasibility_solve

__version__ = "0.1.0"

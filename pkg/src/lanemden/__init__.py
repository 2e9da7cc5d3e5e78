"""Nonlinear eigenvalues of the Navier p-bilaplacian on grids.

Green-function landscapes for ``p = 1``, inverse-power minimization for
``p > 1``, closed forms on the unit ball, and least-energy solutions of the
Lane-Emden system with their ``beta -> inf`` limit.
"""
from .closedform import (
    a_coeff,
    ball_summary,
    c_N,
    green_ball_lq_norm,
    kappa,
    lambda_1q_ball,
    least_energy_level,
    u_infty_profile,
    v_infty_profile,
)
from .eigen import EigenOptions, EigenResult, hamiltonian_residual, minimize_lambda, p_sweep, rayleigh_quotient
from .asymptotics import SystemSolution, beta_sweep, check_limit_ball, solve_system
from .experiments import faber_krahn_compare, spinning_top_h, spinning_top_hprime, spinning_top_root
from .geometry import (
    DomainSpec,
    Grid2D,
    RadialGrid,
    ScalarField,
    build_grid,
    discrete_laplacian,
    poisson_solve,
    torsion,
)
from .greenfn import green_column, jensen_lower_bound_check, lambda_one, landscape
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DomainSpec",
    "EigenOptions",
    "EigenResult",
    "Grid2D",
    "RadialGrid",
    "ScalarField",
    "SystemSolution",
    "a_coeff",
    "ball_summary",
    "beta_sweep",
    "build_grid",
    "c_N",
    "check_limit_ball",
    "discrete_laplacian",
    "faber_krahn_compare",
    "green_ball_lq_norm",
    "green_column",
    "hamiltonian_residual",
    "jensen_lower_bound_check",
    "kappa",
    "lambda_1q_ball",
    "lambda_one",
    "landscape",
    "least_energy_level",
    "minimize_lambda",
    "p_sweep",
    "poisson_solve",
    "rayleigh_quotient",
    "solve_system",
    "spinning_top_h",
    "spinning_top_hprime",
    "spinning_top_root",
    "torsion",
    "u_infty_profile",
    "v_infty_profile",
]

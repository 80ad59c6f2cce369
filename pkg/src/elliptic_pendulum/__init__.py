"""Closed-form pendulum dynamics through the Weierstrass elliptic function.

The pendulum theta'' = 4 c sin(theta) linearizes on the Jacobian of an
elliptic curve: each initial condition determines invariants (g2, g3),
a period lattice, and a point g1, after which the trajectory is a
straight line evaluated through the Weierstrass p-function.  The same
reduction solves commuting Hermitian matrix pendulums eigenpair by
eigenpair.  An independent adaptive Runge-Kutta oracle quantifies how
the closed form outlasts direct integration on long horizons.
"""

from .elliptic import (Invariants, Lattice, carlson_rf, discriminant,
                       half_periods, is_degenerate, jacobi_am,
                       lattice_invariants, reduce_to_fundamental, solve_cubic,
                       wp, wp_inverse, wp_pair, wp_prime)
from .errors import (DegenerateCurve, DimensionMismatch,
                     EllipticPendulumError, NonCommutingInput, NonConvergence,
                     NotOnCurve, PoleAtInput, SeparatrixUnsupported,
                     StepLimitExceeded, StepUnderflow, UnsupportedInitialAngle,
                     UnsupportedParameter, ZeroCoupling)
from .matrix import (MatrixPendulumSolution, commutator_norm, hermitian_eig,
                     matrix_energy, matrix_omega_at, matrix_theta_at,
                     simultaneous_diagonalize, solve_matrix_pendulum)
from .oracle import (IntegratorSettings, MatrixOracleRun, OracleRun,
                     integrate_matrix, integrate_scalar, residual_check)
from .pendulum import (PendulumConfig, PendulumCurve, Regime, Trajectory,
                       build_curve, classify, energy, eval_state,
                       jacobi_solution, jacobi_state, real_period,
                       sample_trajectory)

__version__ = "0.1.0"

__all__ = [
    "Invariants", "Lattice", "carlson_rf", "discriminant", "half_periods",
    "is_degenerate", "jacobi_am", "lattice_invariants",
    "reduce_to_fundamental", "solve_cubic", "wp", "wp_inverse", "wp_pair",
    "wp_prime",
    "EllipticPendulumError", "NonConvergence", "DegenerateCurve",
    "PoleAtInput", "NotOnCurve", "UnsupportedParameter", "ZeroCoupling",
    "SeparatrixUnsupported", "UnsupportedInitialAngle", "DimensionMismatch",
    "NonCommutingInput", "StepLimitExceeded", "StepUnderflow",
    "PendulumConfig", "PendulumCurve", "Regime", "Trajectory", "build_curve",
    "classify", "energy", "eval_state", "jacobi_solution", "jacobi_state",
    "real_period", "sample_trajectory",
    "MatrixPendulumSolution", "commutator_norm", "hermitian_eig",
    "matrix_energy", "matrix_omega_at", "matrix_theta_at",
    "simultaneous_diagonalize", "solve_matrix_pendulum",
    "IntegratorSettings", "MatrixOracleRun", "OracleRun", "integrate_matrix",
    "integrate_scalar", "residual_check",
    "__version__",
]

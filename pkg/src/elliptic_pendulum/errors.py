"""Exception taxonomy for the elliptic pendulum library.

Every failure mode surfaced by the public API is one of the classes below,
so callers (and the CLI exit-code mapping) can dispatch on type alone.
"""


class EllipticPendulumError(Exception):
    """Base class for all library errors."""


class NonConvergence(EllipticPendulumError):
    """An iteration (Carlson duplication, Jacobi sweeps, ...) hit its cap."""


class DegenerateCurve(EllipticPendulumError):
    """The discriminant vanishes within tolerance: separatrix data."""


class PoleAtInput(EllipticPendulumError):
    """wp/wp_prime evaluated within tolerance of a lattice point."""


class NotOnCurve(EllipticPendulumError):
    """wp_inverse got a (w, w') pair violating y^2 = 4x^3 - g2 x - g3."""


class UnsupportedParameter(EllipticPendulumError):
    """jacobi_am called with parameter m outside its domain (m >= 1)."""


class ZeroCoupling(EllipticPendulumError):
    """Pendulum coupling c = 0 (free rotor, no elliptic structure)."""


class SeparatrixUnsupported(EllipticPendulumError):
    """Closed-form evaluation requested on separatrix data."""


class UnsupportedInitialAngle(EllipticPendulumError):
    """jacobi_solution requires theta0 = 0."""


class DimensionMismatch(EllipticPendulumError):
    """Matrix operands of unequal dimension."""


class NonCommutingInput(EllipticPendulumError):
    """Matrix initial data does not commute; outside the solvable class."""


class StepLimitExceeded(EllipticPendulumError):
    """ODE integrator exceeded its maximum step count."""


class StepUnderflow(EllipticPendulumError):
    """ODE integrator step size collapsed below representable resolution."""

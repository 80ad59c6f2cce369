"""Closed-form pendulum trajectories on elliptic curves.

The pendulum theta'' = 4 c sin(theta) becomes polynomial on the unit
circle: u = exp(i theta) satisfies u'' = 6 c u^2 - 2 E u + 2 c, with E
the conserved energy.  Shifting by b = E/(6c) kills the square term and
rescaling by the real cube root q of c leaves exactly the second-order
equation of the Weierstrass p-function, so every initial condition owns
an elliptic curve y^2 = 4x^3 - g2 x - g3 and

    u(t) = b + wp(q (t + g1)) / q

where g1 locates the initial point on the curve.  The trajectory is a
straight-line translation on the torus C/Lambda; theta(t) = arg u(t)
and the angular velocity follows from wp' by the chain rule.

The critical energy E^2 = 16 c^2 (separatrix, including the rest
states) collapses the discriminant, and no closed form is provided
there; the adaptive integrator in the oracle module covers that
measure-zero set.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import (
    Invariants,
    Lattice,
    discriminant,
    half_periods,
    jacobi_am,
    wp_inverse,
    wp_pair,
)
from .errors import (
    DegenerateCurve,
    SeparatrixUnsupported,
    UnsupportedInitialAngle,
    UnsupportedParameter,
    ZeroCoupling,
)

# |E^2 - 16 c^2| below this (relative to 1 + E^2) is treated as critical
_SEPARATRIX_TOL = 1e-9


class Regime(enum.Enum):
    """Qualitative orbit type of a scalar pendulum."""

    LIBRATION = "libration"
    ROTATION = "rotation"
    SEPARATRIX = "separatrix"


@dataclass(frozen=True)
class PendulumConfig:
    """Initial data: coupling c != 0, angle theta0, angular velocity omega0."""

    c: float
    theta0: float
    omega0: float


@dataclass(frozen=True)
class PendulumCurve:
    """Complete closed-form solution record for one initial condition.

    shift is b = E/(6c), depressed is the constant a = 2c - E^2/(6c) of
    the squared-term-free equation w'' = 6 c w^2 + a, and scale is the
    real cube root q of c.  On the separatrix the record is still built
    but lattice and g1 are None: there is no finite period lattice.
    """

    config: PendulumConfig
    energy: float
    shift: float
    depressed: float
    scale: float
    invariants: Invariants
    lattice: Lattice | None
    g1: complex | None
    discriminant: float
    regime: Regime


@dataclass(frozen=True)
class Trajectory:
    """Uniformly ordered samples (t, theta, omega) plus recomputed energy."""

    t: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    energy: np.ndarray

    def __len__(self) -> int:
        return len(self.t)


def energy(cfg: PendulumConfig) -> float:
    """Conserved energy E = omega0^2/2 + 4 c cos(theta0)."""
    return 0.5 * cfg.omega0 ** 2 + 4 * cfg.c * math.cos(cfg.theta0)


def _real_cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _wrap_angle(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    if y <= -math.pi:
        y += 2 * math.pi
    return y


def _regime_of(e: float, c: float) -> Regime:
    gap = e * e - 16 * c * c
    if abs(gap) <= _SEPARATRIX_TOL * (1 + e * e):
        return Regime.SEPARATRIX
    return Regime.ROTATION if gap > 0 else Regime.LIBRATION


def classify(curve: PendulumCurve) -> Regime:
    """Regime from the energy test: rotation iff E^2 > 16 c^2."""
    return _regime_of(curve.energy, curve.config.c)


def build_curve(cfg: PendulumConfig) -> PendulumCurve:
    """Map initial data to its elliptic curve and initial point.

    Follows the reduction chain u0 = exp(i theta0), w0 = u0 - b,
    raw g2 = -2a, then rescales by q so the invariants land in the
    normalization in which u = b + wp/q solves the original equation:
    g2 -> raw g2 / q and g3 = 4 c w0^3 - raw g2 w0 - u0'^2, whose
    imaginary part cancels identically and is discarded.  g1 comes from
    inverting wp at the initial point so evaluation at t = 0 reproduces
    (theta0, omega0).

    Raises ZeroCoupling for c = 0.  A critical configuration returns a
    record with regime = SEPARATRIX and lattice/g1 unset instead of
    raising.
    """
    if cfg.c == 0:
        raise ZeroCoupling("build_curve requires a nonzero coupling c")
    e = energy(cfg)
    q = _real_cbrt(cfg.c)
    b = e / (6 * cfg.c)
    a = 2 * cfg.c - e * e / (6 * cfg.c)
    u0 = cmath.exp(1j * cfg.theta0)
    du0 = 1j * cfg.omega0 * u0
    w0 = u0 - b
    raw_g2 = -2 * a
    g2 = raw_g2 / q
    g3 = (4 * cfg.c * w0 ** 3 - raw_g2 * w0 - du0 * du0).real
    regime = _regime_of(e, cfg.c)
    lat = None
    g1 = None
    if regime is not Regime.SEPARATRIX:
        try:
            lat = half_periods(g2, g3)
        except DegenerateCurve:
            regime = Regime.SEPARATRIX
        else:
            s0 = wp_inverse(q * w0, du0, lat)
            g1 = s0 / q
    return PendulumCurve(
        config=cfg,
        energy=e,
        shift=b,
        depressed=a,
        scale=q,
        invariants=Invariants(g2, g3),
        lattice=lat,
        g1=g1,
        discriminant=discriminant(g2, g3).real,
        regime=regime,
    )


def eval_state(curve: PendulumCurve, t: float) -> tuple[float, float]:
    """(theta(t), omega(t)) from the closed form, theta in (-pi, pi].

    omega is Im(u'/u) with u' = wp'(q(t+g1)) -- the chain rule through
    the argument function, no numerical differentiation.
    """
    if curve.lattice is None or curve.g1 is None:
        raise SeparatrixUnsupported(
            "no closed form on the separatrix; integrate the ODE instead")
    if not math.isfinite(t):
        raise UnsupportedParameter("eval_state requires finite t")
    q = curve.scale
    p, pp = wp_pair(q * (t + curve.g1), curve.lattice)
    u = curve.shift + p / q
    theta = math.atan2(u.imag, u.real)
    if theta <= -math.pi:
        theta = math.pi
    omega = (pp / u).imag
    return theta, omega


def sample_trajectory(curve: PendulumCurve, t0: float, t1: float,
                      n: int) -> Trajectory:
    """n uniform closed-form samples over [t0, t1], n >= 2."""
    if not t0 < t1:
        raise UnsupportedParameter("sample_trajectory requires t0 < t1")
    n = int(n)
    if n < 2:
        raise UnsupportedParameter("sample_trajectory requires n >= 2")
    ts = np.linspace(t0, t1, n)
    theta = np.empty(n)
    omega = np.empty(n)
    for i in range(n):
        theta[i], omega[i] = eval_state(curve, float(ts[i]))
    en = 0.5 * omega ** 2 + 4 * curve.config.c * np.cos(theta)
    return Trajectory(t=ts, theta=theta, omega=omega, energy=en)


def real_period(curve: PendulumCurve) -> float:
    """Smallest T > 0 with theta(t+T) = theta(t), mod 2 pi when rotating.

    The lattice translation advances by omega1 per period, and time runs
    |q| times faster than the lattice coordinate.
    """
    if curve.lattice is None:
        raise SeparatrixUnsupported("the separatrix orbit is not periodic")
    return curve.lattice.omega1.real / abs(curve.scale)


def jacobi_state(cfg: PendulumConfig, t: float) -> tuple[float, float]:
    """(theta, omega) at time t from the Jacobi-amplitude solution.

    Valid for theta0 = 0 and omega0 != 0.  With m = -16 c / omega0^2 the
    rotating branch (m < 1) is theta = 2 am(omega0 t / 2 | m); the
    librating branch (m > 1) is continued through the reciprocal-
    parameter identity sn(u|m) = sn(u sqrt(m) | 1/m) / sqrt(m), which
    keeps the amplitude real past the turning points.
    """
    if cfg.theta0 != 0:
        raise UnsupportedInitialAngle(
            "the Jacobi-amplitude solution requires theta0 = 0")
    v = cfg.omega0
    if v == 0:
        raise UnsupportedParameter(
            "the Jacobi-amplitude solution requires omega0 != 0")
    m = -16 * cfg.c / (v * v)
    if m < 1:
        phi = jacobi_am(v * t / 2, m)
        sn = math.sin(phi)
        theta = 2 * phi
        dtheta = v * math.sqrt(max(0.0, 1 - m * sn * sn))
    else:
        mu = 1 / m
        rm = math.sqrt(m)
        phi = jacobi_am(v * rm * t / 2, mu)
        sn = math.sin(phi)
        cn = math.cos(phi)
        dn = math.sqrt(max(0.0, 1 - mu * sn * sn))
        sin_half = sn / rm
        cos_half = math.sqrt(max(0.0, 1 - sin_half * sin_half))
        theta = 2 * math.asin(min(1.0, max(-1.0, sin_half)))
        dtheta = v * cn * dn / cos_half
    return _wrap_angle(theta), dtheta


def jacobi_solution(cfg: PendulumConfig, t: float) -> float:
    """theta(t) = 2 am(omega0 t/2 | m) reduced to (-pi, pi], theta0 = 0."""
    return jacobi_state(cfg, t)[0]

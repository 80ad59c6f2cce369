"""Adaptive Runge-Kutta reference integrator for the pendulum equations.

Everything in this module is deliberately independent of the elliptic
machinery: an embedded Dormand-Prince 5(4) pair with PI step-size
control and fourth-order dense output, applied to the scalar system
(theta, omega)' = (omega, 4 c sin theta) and, componentwise through the
eigendecomposition, to the Hermitian matrix system.  It exists to
cross-check the closed-form trajectories and to quantify how secular
error growth eventually makes direct integration unreliable on long
horizons where the closed form is not.

The scalar kernel is compiled with numba so the million-time-unit
degradation runs finish in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np

from .errors import StepLimitExceeded, StepUnderflow, UnsupportedParameter
from .pendulum import PendulumConfig, Trajectory

# Dormand-Prince RK5(4) tableau
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (9017 / 3168, -355 / 33, 46732 / 5247,
                                49 / 176, -5103 / 18656)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)
# dense-output weights for the quartic interpolant
_D1 = -12715105075 / 11282082432
_D3 = 87487479700 / 32700410799
_D4 = -10690763975 / 1880347072
_D5 = 701980252875 / 199316789632
_D6 = -1453857185 / 822651844
_D7 = 69997945 / 29380423

_STATUS_OK = 0
_STATUS_STEP_LIMIT = 1
_STATUS_UNDERFLOW = 2


@dataclass(frozen=True)
class IntegratorSettings:
    """Adaptive step control parameters; tolerances must be positive."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 50_000_000

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise UnsupportedParameter("tolerances must be positive")
        if self.max_step <= 0 or self.max_steps <= 0:
            raise UnsupportedParameter("step bounds must be positive")


@dataclass(frozen=True)
class OracleRun:
    """Result of a scalar integration: samples plus drift diagnostics.

    energy_drift is the max of |E(t) - E(0)| over all accepted steps,
    not just over the requested sample times.
    """

    trajectory: Trajectory
    energy_drift: float
    steps_taken: int
    rejected_steps: int


@dataclass(frozen=True)
class MatrixOracleRun:
    """Result of a matrix integration; drifts in the Frobenius norm."""

    t: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    energy_drift: float
    hermiticity_drift: float
    steps_taken: int
    rejected_steps: int


@numba.njit(cache=True)
def _dopri5_pendulum(c, th0, om0, t_end, rtol, atol, hmax, max_steps, t_eval):
    n_eval = t_eval.shape[0]
    out_th = np.empty(n_eval)
    out_om = np.empty(n_eval)
    ieval = 0
    t = 0.0
    th = th0
    om = om0
    f1t = om
    f1o = 4 * c * math.sin(th)
    while ieval < n_eval and t_eval[ieval] <= t:
        out_th[ieval] = th
        out_om[ieval] = om
        ieval += 1
    e0 = 0.5 * om0 * om0 + 4 * c * math.cos(th0)
    drift = 0.0
    h = 1e-3
    if h > hmax:
        h = hmax
    errold = 1e-4
    nacc = 0
    nrej = 0
    status = _STATUS_STEP_LIMIT
    for _ in range(max_steps):
        if t >= t_end:
            status = _STATUS_OK
            break
        hit_end = False
        if t + h >= t_end:
            h = t_end - t
            hit_end = True
        yt = th + h * _A21 * f1t
        yo = om + h * _A21 * f1o
        f2t = yo
        f2o = 4 * c * math.sin(yt)
        yt = th + h * (_A31 * f1t + _A32 * f2t)
        yo = om + h * (_A31 * f1o + _A32 * f2o)
        f3t = yo
        f3o = 4 * c * math.sin(yt)
        yt = th + h * (_A41 * f1t + _A42 * f2t + _A43 * f3t)
        yo = om + h * (_A41 * f1o + _A42 * f2o + _A43 * f3o)
        f4t = yo
        f4o = 4 * c * math.sin(yt)
        yt = th + h * (_A51 * f1t + _A52 * f2t + _A53 * f3t + _A54 * f4t)
        yo = om + h * (_A51 * f1o + _A52 * f2o + _A53 * f3o + _A54 * f4o)
        f5t = yo
        f5o = 4 * c * math.sin(yt)
        yt = th + h * (_A61 * f1t + _A62 * f2t + _A63 * f3t + _A64 * f4t + _A65 * f5t)
        yo = om + h * (_A61 * f1o + _A62 * f2o + _A63 * f3o + _A64 * f4o + _A65 * f5o)
        f6t = yo
        f6o = 4 * c * math.sin(yt)
        nth = th + h * (_B1 * f1t + _B3 * f3t + _B4 * f4t + _B5 * f5t + _B6 * f6t)
        nom = om + h * (_B1 * f1o + _B3 * f3o + _B4 * f4o + _B5 * f5o + _B6 * f6o)
        f7t = nom
        f7o = 4 * c * math.sin(nth)
        errt = h * (_E1 * f1t + _E3 * f3t + _E4 * f4t + _E5 * f5t + _E6 * f6t + _E7 * f7t)
        erro = h * (_E1 * f1o + _E3 * f3o + _E4 * f4o + _E5 * f5o + _E6 * f6o + _E7 * f7o)
        skt = atol + rtol * max(abs(th), abs(nth))
        sko = atol + rtol * max(abs(om), abs(nom))
        err = math.sqrt(0.5 * ((errt / skt) ** 2 + (erro / sko) ** 2))
        if err <= 1.0:
            # dense output on the accepted step before advancing
            while ieval < n_eval and t_eval[ieval] <= t + h:
                s = (t_eval[ieval] - t) / h
                if s < 0.0:
                    s = 0.0
                elif s > 1.0:
                    s = 1.0
                s1 = 1.0 - s
                ydiff = nth - th
                r3 = h * f1t - ydiff
                r4 = ydiff - h * f7t - r3
                r5 = h * (_D1 * f1t + _D3 * f3t + _D4 * f4t + _D5 * f5t
                          + _D6 * f6t + _D7 * f7t)
                out_th[ieval] = th + s * (ydiff + s1 * (r3 + s * (r4 + s1 * r5)))
                ydiff = nom - om
                r3 = h * f1o - ydiff
                r4 = ydiff - h * f7o - r3
                r5 = h * (_D1 * f1o + _D3 * f3o + _D4 * f4o + _D5 * f5o
                          + _D6 * f6o + _D7 * f7o)
                out_om[ieval] = om + s * (ydiff + s1 * (r3 + s * (r4 + s1 * r5)))
                ieval += 1
            t = t_end if hit_end else t + h
            # the vector field is 2 pi periodic in theta: keeping the phase
            # wrapped stops the relative-error scale from growing with the
            # winding number on rotating orbits
            th = nth - 2 * math.pi * math.floor(nth / (2 * math.pi) + 0.5)
            om = nom
            f1t = f7t
            f1o = f7o
            nacc += 1
            e = 0.5 * om * om + 4 * c * math.cos(th)
            d = abs(e - e0)
            if d > drift:
                drift = d
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * err ** -0.17 * errold ** 0.04
                if fac > 5.0:
                    fac = 5.0
            errold = max(err, 1e-4)
            h *= fac
        else:
            nrej += 1
            h *= max(0.2, 0.9 * err ** -0.2)
        if h > hmax:
            h = hmax
        if h <= 3.6e-15 * max(1.0, abs(t)):
            status = _STATUS_UNDERFLOW
            break
    while ieval < n_eval:
        out_th[ieval] = th
        out_om[ieval] = om
        ieval += 1
    return out_th, out_om, drift, nacc, nrej, status


def _check_run_status(status: int, steps: int) -> None:
    if status == _STATUS_STEP_LIMIT:
        raise StepLimitExceeded(f"integration exceeded {steps} steps")
    if status == _STATUS_UNDERFLOW:
        raise StepUnderflow("step size underflowed; the system may be singular")


def _eval_times(t_end: float, t_eval) -> np.ndarray:
    if t_eval is None:
        return np.linspace(0.0, t_end, 201)
    ts = np.asarray(t_eval, dtype=np.float64)
    if ts.ndim != 1 or ts.size == 0:
        raise UnsupportedParameter("t_eval must be a nonempty 1-d array")
    if np.any(np.diff(ts) < 0):
        raise UnsupportedParameter("t_eval must be sorted ascending")
    if ts[0] < 0 or ts[-1] > t_end:
        raise UnsupportedParameter("t_eval must lie within [0, t_end]")
    return ts


def integrate_scalar(cfg: PendulumConfig, t_end: float,
                     settings: IntegratorSettings | None = None,
                     t_eval=None) -> OracleRun:
    """Integrate (theta, omega)' = (omega, 4 c sin theta) up to t_end.

    Samples are produced at t_eval (uniform 201 points by default) via
    the fourth-order continuous extension of the accepted steps, so the
    integration grid never depends on the requested output times.  The
    kernel integrates the phase modulo 2 pi (the vector field is
    periodic in theta), and reported angles lie in (-pi, pi].
    """
    if not t_end > 0:
        raise UnsupportedParameter("integrate_scalar requires t_end > 0")
    st = settings or IntegratorSettings()
    ts = _eval_times(t_end, t_eval)
    th, om, drift, nacc, nrej, status = _dopri5_pendulum(
        cfg.c, cfg.theta0, cfg.omega0, float(t_end),
        st.rel_tol, st.abs_tol, float(st.max_step), int(st.max_steps), ts)
    _check_run_status(status, st.max_steps)
    th = -np.remainder(-th + np.pi, 2 * np.pi) + np.pi
    en = 0.5 * om ** 2 + 4 * cfg.c * np.cos(th)
    traj = Trajectory(t=ts, theta=th, omega=om, energy=en)
    return OracleRun(trajectory=traj, energy_drift=float(drift),
                     steps_taken=int(nacc), rejected_steps=int(nrej))


def _sin_hermitian(a: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh(a)
    return (v * np.sin(lam)) @ v.conj().T


def _cos_hermitian(a: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh(a)
    return (v * np.cos(lam)) @ v.conj().T


def integrate_matrix(theta0: np.ndarray, omega0: np.ndarray, c: float,
                     t_end: float,
                     settings: IntegratorSettings | None = None,
                     t_eval=None) -> MatrixOracleRun:
    """Integrate the Hermitian matrix pendulum Theta'' = 4 c sin(Theta).

    sin is evaluated through the eigendecomposition at every stage; the
    inputs need not commute, since the raw ODE is integrated directly.
    Hermiticity is enforced by symmetrizing after each accepted step and
    the largest correction applied is reported as hermiticity_drift.
    """
    if not t_end > 0:
        raise UnsupportedParameter("integrate_matrix requires t_end > 0")
    st = settings or IntegratorSettings()
    ts = _eval_times(t_end, t_eval)
    th = np.array(theta0, dtype=np.complex128)
    om = np.array(omega0, dtype=np.complex128)
    if th.ndim != 2 or th.shape[0] != th.shape[1] or th.shape != om.shape:
        raise UnsupportedParameter("theta0 and omega0 must be square and match")

    def deriv(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return b, 4 * c * _sin_hermitian(a)

    n_eval = ts.shape[0]
    out_th = np.empty((n_eval,) + th.shape, dtype=np.complex128)
    out_om = np.empty_like(out_th)
    ieval = 0
    t = 0.0
    while ieval < n_eval and ts[ieval] <= t:
        out_th[ieval] = th
        out_om[ieval] = om
        ieval += 1
    e_ref = om @ om / 2 + 4 * c * _cos_hermitian(th)
    energy_drift = 0.0
    herm_drift = 0.0
    a_ = ((_A21,), (_A31, _A32), (_A41, _A42, _A43), (_A51, _A52, _A53, _A54),
          (_A61, _A62, _A63, _A64, _A65))
    h = min(1e-3, st.max_step)
    errold = 1e-4
    nacc = 0
    nrej = 0
    status = _STATUS_STEP_LIMIT
    for _ in range(st.max_steps):
        if t >= t_end:
            status = _STATUS_OK
            break
        hit_end = False
        if t + h >= t_end:
            h = t_end - t
            hit_end = True
        k = [deriv(th, om)]
        for coeffs in a_:
            ath = th.copy()
            aom = om.copy()
            for w, (kt, ko) in zip(coeffs, k):
                ath += h * w * kt
                aom += h * w * ko
            k.append(deriv(ath, aom))
        nth = th + h * (_B1 * k[0][0] + _B3 * k[2][0] + _B4 * k[3][0]
                        + _B5 * k[4][0] + _B6 * k[5][0])
        nom = om + h * (_B1 * k[0][1] + _B3 * k[2][1] + _B4 * k[3][1]
                        + _B5 * k[4][1] + _B6 * k[5][1])
        k.append(deriv(nth, nom))
        errt = h * (_E1 * k[0][0] + _E3 * k[2][0] + _E4 * k[3][0]
                    + _E5 * k[4][0] + _E6 * k[5][0] + _E7 * k[6][0])
        erro = h * (_E1 * k[0][1] + _E3 * k[2][1] + _E4 * k[3][1]
                    + _E5 * k[4][1] + _E6 * k[5][1] + _E7 * k[6][1])
        skt = st.abs_tol + st.rel_tol * np.maximum(np.abs(th), np.abs(nth))
        sko = st.abs_tol + st.rel_tol * np.maximum(np.abs(om), np.abs(nom))
        err = math.sqrt(0.5 * (np.mean(np.abs(errt / skt) ** 2)
                               + np.mean(np.abs(erro / sko) ** 2)))
        if err <= 1.0:
            while ieval < n_eval and ts[ieval] <= t + h:
                s = min(1.0, max(0.0, (ts[ieval] - t) / h))
                s1 = 1.0 - s
                for (old, new, kt_i, out) in ((th, nth, 0, out_th),
                                              (om, nom, 1, out_om)):
                    ydiff = new - old
                    r3 = h * k[0][kt_i] - ydiff
                    r4 = ydiff - h * k[6][kt_i] - r3
                    r5 = h * (_D1 * k[0][kt_i] + _D3 * k[2][kt_i]
                              + _D4 * k[3][kt_i] + _D5 * k[4][kt_i]
                              + _D6 * k[5][kt_i] + _D7 * k[6][kt_i])
                    out[ieval] = old + s * (ydiff + s1 * (r3 + s * (r4 + s1 * r5)))
                ieval += 1
            t = t_end if hit_end else t + h
            th, om = nth, nom
            herm = max(np.linalg.norm(th - th.conj().T),
                       np.linalg.norm(om - om.conj().T))
            herm_drift = max(herm_drift, float(herm))
            th = (th + th.conj().T) / 2
            om = (om + om.conj().T) / 2
            nacc += 1
            e = om @ om / 2 + 4 * c * _cos_hermitian(th)
            energy_drift = max(energy_drift, float(np.linalg.norm(e - e_ref)))
            fac = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.17 * errold ** 0.04)
            errold = max(err, 1e-4)
            h *= fac
        else:
            nrej += 1
            h *= max(0.2, 0.9 * err ** -0.2)
        h = min(h, st.max_step)
        if h <= 3.6e-15 * max(1.0, abs(t)):
            status = _STATUS_UNDERFLOW
            break
    while ieval < n_eval:
        out_th[ieval] = th
        out_om[ieval] = om
        ieval += 1
    _check_run_status(status, st.max_steps)
    return MatrixOracleRun(t=ts, theta=out_th, omega=out_om,
                           energy_drift=energy_drift,
                           hermiticity_drift=herm_drift,
                           steps_taken=nacc, rejected_steps=nrej)


def residual_check(f: Callable[[float], float], t: float, h: float,
                   c: float) -> float:
    """|f'' - 4 c sin f| at t, with f'' from second-order central differences."""
    if h <= 0:
        raise UnsupportedParameter("residual_check requires h > 0")
    second = (f(t + h) - 2 * f(t) + f(t - h)) / (h * h)
    return abs(second - 4 * c * math.sin(f(t)))

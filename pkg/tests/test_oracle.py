"""Adaptive integrator: step control, drift behavior, matrix variant."""

import math

import numpy as np
import pytest

from conftest import reference_config, wrap_diff
from elliptic_pendulum.errors import StepLimitExceeded, UnsupportedParameter
from elliptic_pendulum.oracle import (IntegratorSettings, integrate_matrix,
                                      integrate_scalar, residual_check)
from elliptic_pendulum.pendulum import (PendulumConfig, build_curve,
                                        eval_state, sample_trajectory)


def test_equilibrium_is_exact():
    run = integrate_scalar(PendulumConfig(-1.0, 0.0, 0.0), 5.0)
    assert np.all(run.trajectory.theta == 0.0)
    assert np.all(run.trajectory.omega == 0.0)
    assert run.energy_drift == 0.0


def test_matches_closed_form_libration_and_rotation():
    ts = np.linspace(0.0, 100.0, 200)
    for v in (1.0, 4.1):
        cfg = reference_config(v)
        curve = build_curve(cfg)
        run = integrate_scalar(cfg, 100.0, t_eval=ts)
        for i, t in enumerate(ts):
            th, om = eval_state(curve, float(t))
            assert wrap_diff(run.trajectory.theta[i], th) <= 1e-6
            assert abs(run.trajectory.omega[i] - om) <= 1e-6 * (1 + abs(om))


def test_reported_angles_are_wrapped():
    # a fast rotor winds many times; reported theta must stay in (-pi, pi]
    run = integrate_scalar(reference_config(5.0), 50.0)
    th = run.trajectory.theta
    assert np.all(th > -math.pi) and np.all(th <= math.pi)


def test_fifth_order_convergence():
    # pin the step with max_step and disable the error control with huge
    # tolerances; the end-state error should fall like h^5
    cfg = PendulumConfig(-1.0, 0.4, 1.2)
    curve = build_curve(cfg)
    t_end = 4.0
    ref_th, ref_om = eval_state(curve, t_end)
    errs = []
    for hstep in (0.04, 0.02, 0.01):
        st = IntegratorSettings(rel_tol=1.0, abs_tol=1.0, max_step=hstep)
        run = integrate_scalar(cfg, t_end, settings=st,
                               t_eval=np.array([0.0, t_end]))
        errs.append(math.hypot(
            math.remainder(run.trajectory.theta[-1] - ref_th, 2 * math.pi),
            run.trajectory.omega[-1] - ref_om))
    assert 20 < errs[0] / errs[1] < 50
    assert 20 < errs[1] / errs[2] < 50


def test_time_reversal_symmetry():
    cfg = PendulumConfig(-1.0, 0.4, 1.2)
    ends = np.array([0.0, 3.0])
    fwd = integrate_scalar(cfg, 3.0, t_eval=ends)
    back = integrate_scalar(
        PendulumConfig(cfg.c, float(fwd.trajectory.theta[-1]),
                       float(-fwd.trajectory.omega[-1])), 3.0, t_eval=ends)
    assert wrap_diff(back.trajectory.theta[-1], cfg.theta0) <= 1e-8
    assert abs(-back.trajectory.omega[-1] - cfg.omega0) <= 1e-8


def test_energy_drift_ordering_long_horizon():
    # at rtol 1e-6 the integrator drifts measurably by t = 1e4 while the
    # closed form stays at rounding level
    cfg = PendulumConfig(-1.0, 0.0, 2.0)
    st = IntegratorSettings(rel_tol=1e-6, abs_tol=1e-8)
    run = integrate_scalar(cfg, 1e4, settings=st,
                           t_eval=np.array([0.0, 1e4]))
    curve = build_curve(cfg)
    traj = sample_trajectory(curve, 0.0, 1e4, 2001)
    closed = float(np.max(np.abs(traj.energy - curve.energy)))
    assert closed <= 1e-8
    assert run.energy_drift >= 10 * closed
    assert run.energy_drift > 1e-6


def test_step_limit_raises():
    st = IntegratorSettings(max_steps=10)
    with pytest.raises(StepLimitExceeded):
        integrate_scalar(reference_config(1.0), 100.0, settings=st)


def test_settings_validation():
    for kwargs in ({"rel_tol": 0.0}, {"abs_tol": -1.0},
                   {"max_step": 0.0}, {"max_steps": 0}):
        with pytest.raises(UnsupportedParameter):
            IntegratorSettings(**kwargs)


def test_time_grid_validation():
    cfg = reference_config(1.0)
    with pytest.raises(UnsupportedParameter):
        integrate_scalar(cfg, 0.0)
    with pytest.raises(UnsupportedParameter):
        integrate_scalar(cfg, -1.0)
    with pytest.raises(UnsupportedParameter):
        integrate_scalar(cfg, 1.0, t_eval=np.array([0.5, 0.2]))
    with pytest.raises(UnsupportedParameter):
        integrate_scalar(cfg, 1.0, t_eval=np.array([0.0, 2.0]))
    with pytest.raises(UnsupportedParameter):
        integrate_scalar(cfg, 1.0, t_eval=np.array([[0.0, 1.0]]))
    with pytest.raises(UnsupportedParameter):
        integrate_scalar(cfg, 1.0, t_eval=np.array([]))


def test_residual_check_on_closed_form():
    curve = build_curve(reference_config(1.0))

    def f(t):
        return eval_state(curve, t)[0]

    for t in (0.37, 1.9, 4.4):
        assert residual_check(f, t, 3e-4, -1.0) <= 1e-5


def test_residual_check_constant_and_validation():
    assert residual_check(lambda t: 0.0, 1.0, 1e-3, -1.0) <= 1e-12
    with pytest.raises(UnsupportedParameter):
        residual_check(lambda t: 0.0, 1.0, 0.0, -1.0)


# --------------------------------------------------------------- matrix

def test_matrix_diagonal_decouples_to_scalar():
    ts = np.linspace(0.0, 10.0, 51)
    run = integrate_matrix(np.diag([0.3, -0.2]).astype(complex),
                           np.diag([1.0, 2.0]).astype(complex),
                           -1.0, 10.0, t_eval=ts)
    assert run.hermiticity_drift <= 1e-12
    for idx, (t0v, o0v) in enumerate(((0.3, 1.0), (-0.2, 2.0))):
        scalar = integrate_scalar(PendulumConfig(-1.0, t0v, o0v), 10.0,
                                  t_eval=ts)
        assert np.max(np.abs(run.theta[:, idx, idx].real
                             - scalar.trajectory.theta)) <= 1e-8
        assert np.max(np.abs(run.omega[:, idx, idx].real
                             - scalar.trajectory.omega)) <= 1e-8
    assert np.max(np.abs(run.theta[:, 0, 1])) <= 1e-12
    assert np.max(np.abs(run.omega[:, 1, 0])) <= 1e-12


def test_matrix_zero_data_stays_zero():
    run = integrate_matrix(np.zeros((2, 2), complex),
                           np.zeros((2, 2), complex), -1.0, 1.0)
    assert np.all(run.theta == 0.0) and np.all(run.omega == 0.0)
    assert run.energy_drift == 0.0


def test_matrix_energy_drift_is_small():
    # energy in this form is conserved for commuting data, so build the
    # pair from a common eigenbasis
    rng = np.random.default_rng(4)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    u = np.linalg.qr(m)[0]
    th0 = (u * rng.uniform(-1.5, 1.5, size=3)) @ u.conj().T
    om0 = (u * rng.uniform(-2.0, 2.0, size=3)) @ u.conj().T
    run = integrate_matrix(th0, om0, -1.0, 10.0)
    assert run.hermiticity_drift <= 1e-12
    assert run.energy_drift <= 1e-7


def test_matrix_input_validation():
    sq = np.zeros((2, 2), complex)
    with pytest.raises(UnsupportedParameter):
        integrate_matrix(np.zeros((2, 3), complex), sq, -1.0, 1.0)
    with pytest.raises(UnsupportedParameter):
        integrate_matrix(sq, np.zeros((3, 3), complex), -1.0, 1.0)
    with pytest.raises(UnsupportedParameter):
        integrate_matrix(sq, sq, -1.0, 0.0)

"""Pendulum dynamics for commuting Hermitian matrix initial data.

A pair of commuting Hermitian matrices (theta0, omega0) shares an
orthonormal eigenbasis, so theta'' = 4 c sin(theta) splits into n
independent scalar pendulums, one per joint eigenpair (lambda_k, mu_k).
Each eigenpair gets its own elliptic curve and the matrix trajectory is
reassembled through the fixed basis by functional calculus:

    theta(t) = U diag(theta_k(t)) U*,    u(t) = U diag(exp(i theta_k(t))) U*.

The joint basis comes from a cyclic complex Jacobi eigensolver rather
than a library routine so the whole reduction is self-contained and the
degenerate-eigenvalue path stays explicit: repeated eigenvalues of
theta0 are resolved by diagonalizing the restriction of omega0 to the
cluster, which is exactly the case the generic random-combination trick
gets wrong.

Energy E(t) = omega(t)^2/2 + 4 c cos(theta(t)) is computed from the
time-t scalar states, so its conservation is a measured property of the
solution rather than an identity built into the formula.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateCurve, DimensionMismatch, NonCommutingInput,
                     NonConvergence, UnsupportedParameter)
from .pendulum import (PendulumConfig, PendulumCurve, Regime, build_curve,
                       eval_state, real_period)

_JACOBI_SWEEPS = 60
_CLUSTER_GAP = 1e-8
_JOINT_RESIDUAL = 1e-8
_HERMITIAN_TOL = 1e-10


def _as_square(a, name: str) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix")
    return m


def _as_hermitian(a, name: str) -> np.ndarray:
    m = _as_square(a, name)
    dev = np.linalg.norm(m - m.conj().T)
    if dev > _HERMITIAN_TOL * max(1.0, np.linalg.norm(m)):
        raise UnsupportedParameter(f"{name} is not Hermitian "
                                   f"(asymmetry {dev:.3e})")
    return m


def commutator_norm(a, b) -> float:
    """Frobenius norm of the commutator [a, b] = ab - ba."""
    ma = _as_square(a, "a")
    mb = _as_square(b, "b")
    if ma.shape != mb.shape:
        raise DimensionMismatch(
            f"dimension mismatch: {ma.shape[0]} vs {mb.shape[0]}")
    return float(np.linalg.norm(ma @ mb - mb @ ma))


def hermitian_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns (U, lam) with a = U diag(lam) U*, lam real ascending and U
    unitary.  Rotations sweep the strict upper triangle in row order,
    each one annihilating a single off-diagonal entry; convergence is
    quadratic, so the sweep cap is generous.

    Raises NonConvergence if the off-diagonal mass has not reached the
    rounding floor within the sweep cap.
    """
    m = _as_hermitian(a, "matrix")
    n = m.shape[0]
    u = np.eye(n, dtype=np.complex128)
    w = m.copy()
    fro = np.linalg.norm(w)
    if n > 1 and fro > 0.0:
        target = 1e-14 * fro
        skip = 0.01 * target / n
        for _ in range(_JACOBI_SWEEPS):
            off = np.linalg.norm(w - np.diag(np.diagonal(w)))
            if off <= target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = w[p, q]
                    r = abs(apq)
                    if r <= skip:
                        continue
                    ph = apq / r
                    tau = (w[q, q].real - w[p, p].real) / (2 * r)
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                    cth = 1.0 / math.sqrt(1.0 + t * t)
                    sth = t * cth
                    # column update w <- w J, then row update w <- J* w
                    cp = w[:, p] * cth - w[:, q] * (sth * np.conj(ph))
                    cq = w[:, p] * (sth * ph) + w[:, q] * cth
                    w[:, p], w[:, q] = cp, cq
                    rp = w[p, :] * cth - w[q, :] * (sth * ph)
                    rq = w[p, :] * (sth * np.conj(ph)) + w[q, :] * cth
                    w[p, :], w[q, :] = rp, rq
                    w[p, q] = 0.0
                    w[q, p] = 0.0
                    cp = u[:, p] * cth - u[:, q] * (sth * np.conj(ph))
                    cq = u[:, p] * (sth * ph) + u[:, q] * cth
                    u[:, p], u[:, q] = cp, cq
        else:
            raise NonConvergence("Jacobi eigensolver did not converge")
    lam = np.diagonal(w).real.copy()
    order = np.argsort(lam, kind="stable")
    return u[:, order], lam[order]


def simultaneous_diagonalize(a, b, tol: float = 1e-10
                             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Find one unitary U diagonalizing two commuting Hermitian matrices.

    Returns (U, lam, mu) with a = U diag(lam) U* and b = U diag(mu) U*.
    lam is ascending; inside a degenerate cluster of a (eigenvalue gap
    at most 1e-8 ||a||) the basis is rotated to diagonalize the
    restriction of b, ordered by ascending mu.

    Raises NonCommutingInput when ||[a, b]|| exceeds tol (||a|| + ||b||),
    or when the residual after the two-stage reduction shows the inputs
    commute only approximately.
    """
    ma = _as_hermitian(a, "a")
    mb = _as_hermitian(b, "b")
    if ma.shape != mb.shape:
        raise DimensionMismatch(
            f"dimension mismatch: {ma.shape[0]} vs {mb.shape[0]}")
    na = float(np.linalg.norm(ma))
    nb = float(np.linalg.norm(mb))
    comm = commutator_norm(ma, mb)
    if comm > tol * (na + nb):
        raise NonCommutingInput(
            f"initial data do not commute: ||[a,b]|| = {comm:.3e} "
            f"exceeds {tol:.1e} (||a|| + ||b||) = {tol * (na + nb):.3e}")
    u, lam = hermitian_eig(ma)
    n = ma.shape[0]
    gap = _CLUSTER_GAP * na
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and lam[stop] - lam[stop - 1] <= gap:
            stop += 1
        if stop - start > 1:
            block = u[:, start:stop]
            sub = block.conj().T @ mb @ block
            sub = (sub + sub.conj().T) / 2
            v, _ = hermitian_eig(sub)
            u[:, start:stop] = block @ v
        start = stop
    da = u.conj().T @ ma @ u
    db = u.conj().T @ mb @ u
    lam = np.diagonal(da).real.copy()
    mu = np.diagonal(db).real.copy()
    res_a = np.linalg.norm(da - np.diag(lam))
    res_b = np.linalg.norm(db - np.diag(mu))
    if res_a > _JOINT_RESIDUAL * max(1.0, na) or \
            res_b > _JOINT_RESIDUAL * max(1.0, nb):
        raise NonCommutingInput(
            f"joint diagonalization residual ({max(res_a, res_b):.3e}) "
            "exceeds tolerance: inputs commute only approximately")
    return u, lam, mu


@dataclass(frozen=True)
class MatrixPendulumSolution:
    """Closed-form matrix pendulum solution in a fixed joint eigenbasis.

    basis holds the unitary U whose columns are the joint eigenvectors;
    scalar_curves holds one PendulumCurve per eigenpair, in basis order.
    """

    c: float
    basis: np.ndarray
    scalar_curves: tuple[PendulumCurve, ...]

    @property
    def n(self) -> int:
        return len(self.scalar_curves)

    def real_periods(self) -> tuple[float, ...]:
        """Per-eigenpair real periods; the invariant torus has at most
        as many independent frequencies as there are distinct values."""
        return tuple(real_period(cv) for cv in self.scalar_curves)


def solve_matrix_pendulum(theta0, omega0, c: float,
                          tol: float = 1e-10) -> MatrixPendulumSolution:
    """Solve theta'' = 4 c sin(theta) for commuting Hermitian data.

    Simultaneously diagonalizes (theta0, omega0) and builds one scalar
    elliptic-curve solution per joint eigenpair.

    Raises NonCommutingInput when the data do not commute within tol and
    DegenerateCurve when some eigenpair lies on the separatrix, naming
    the offending pair.
    """
    u, lam, mu = simultaneous_diagonalize(theta0, omega0, tol)
    curves = []
    for k, (tk, ok) in enumerate(zip(lam, mu)):
        curve = build_curve(PendulumConfig(c=c, theta0=float(tk),
                                           omega0=float(ok)))
        if curve.regime is Regime.SEPARATRIX:
            raise DegenerateCurve(
                f"eigenpair {k} (theta={tk:.6g}, omega={ok:.6g}) lies on "
                "the separatrix; the matrix solution is undefined there")
        curves.append(curve)
    return MatrixPendulumSolution(c=float(c), basis=u,
                                  scalar_curves=tuple(curves))


def _assemble(sol: MatrixPendulumSolution, values) -> np.ndarray:
    u = sol.basis
    m = (u * np.asarray(values)) @ u.conj().T
    return (m + m.conj().T) / 2


def matrix_theta_at(sol: MatrixPendulumSolution,
                    t: float) -> tuple[np.ndarray, np.ndarray]:
    """Matrix angle theta(t) and the group trajectory u(t) = exp(i theta(t)).

    Returns (theta, u): theta Hermitian with eigenvalues in (-pi, pi],
    u unitary.  Both live in the solution's joint eigenbasis.
    """
    angles = [eval_state(cv, t)[0] for cv in sol.scalar_curves]
    theta = _assemble(sol, angles)
    ub = sol.basis
    u = (ub * np.array([cmath.exp(1j * ang) for ang in angles])) @ ub.conj().T
    return theta, u


def matrix_omega_at(sol: MatrixPendulumSolution, t: float) -> np.ndarray:
    """Matrix angular velocity theta'(t), Hermitian."""
    rates = [eval_state(cv, t)[1] for cv in sol.scalar_curves]
    return _assemble(sol, rates)


def matrix_energy(sol: MatrixPendulumSolution, t: float) -> np.ndarray:
    """Energy matrix theta'(t)^2/2 + 4 c cos(theta(t)).

    Evaluated from the time-t scalar states through the joint basis, so
    equality with the t = 0 value is a genuine conservation check.
    """
    vals = []
    for cv in sol.scalar_curves:
        ang, rate = eval_state(cv, t)
        vals.append(rate * rate / 2 + 4 * sol.c * math.cos(ang))
    return _assemble(sol, vals)

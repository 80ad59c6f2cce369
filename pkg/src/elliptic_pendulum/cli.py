"""Command line interface: curve data, trajectories, validation, matrices.

Output is machine oriented: JSON with lowercase snake_case keys in a
fixed field order, or CSV with a header row and LF line endings.  Every
float is serialized as %.16e so identical flags always produce byte
identical output.  Complex numbers appear as two-element [re, im]
arrays.

Exit codes: 0 success, 1 validation failure, 2 unusable input (flag
parse errors, malformed matrix files, restrictions like the Jacobi
method's theta0 = 0 requirement), 3 degenerate curve (separatrix
initial data), 4 non-commuting matrix data.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import (DegenerateCurve, DimensionMismatch, NonCommutingInput,
                     UnsupportedInitialAngle, UnsupportedParameter,
                     ZeroCoupling)
from .matrix import (commutator_norm, matrix_energy, matrix_omega_at,
                     matrix_theta_at, solve_matrix_pendulum)
from .oracle import IntegratorSettings, integrate_scalar, residual_check
from .pendulum import (PendulumConfig, Regime, build_curve, eval_state,
                       jacobi_state, real_period, sample_trajectory)

_EXIT_OK = 0
_EXIT_VALIDATION = 1
_EXIT_USAGE = 2
_EXIT_DEGENERATE = 3
_EXIT_NONCOMMUTING = 4


class _InputError(Exception):
    """Unusable input detected past argument parsing; maps to exit 2."""


def _fmt(x) -> str:
    return format(float(x), ".16e")


def _json_value(v, indent: int = 0) -> str:
    if isinstance(v, dict):
        if not v:
            return "{}"
        inner = " " * (indent + 2)
        items = (f'{inner}"{k}": {_json_value(x, indent + 2)}'
                 for k, x in v.items())
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v + '"'
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, complex):
        return "[" + _fmt(v.real) + ", " + _fmt(v.imag) + "]"
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        parts = [_json_value(x, indent + 2) for x in v]
        if all(isinstance(x, (bool, str, int, float, complex,
                              np.integer, np.floating)) for x in v):
            return "[" + ", ".join(parts) + "]"
        inner = " " * (indent + 2)
        return ("[\n" + ",\n".join(inner + p for p in parts)
                + "\n" + " " * indent + "]")
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _print_json(record: dict) -> None:
    sys.stdout.write(_json_value(record) + "\n")


def _print_csv(t, theta, omega, energy) -> None:
    lines = ["t,theta,omega,energy"]
    for row in zip(t, theta, omega, energy):
        lines.append(",".join(_fmt(x) for x in row))
    sys.stdout.write("\n".join(lines) + "\n")


def _wrap_diff(a: float, b: float) -> float:
    return abs(math.remainder(a - b, 2 * math.pi))


def _curve_record(curve) -> dict:
    cfg = curve.config
    if curve.regime is Regime.SEPARATRIX:
        raise DegenerateCurve(
            "initial data lie on the separatrix (E^2 = 16 c^2): the curve "
            "degenerates and has no lattice")
    lat = curve.lattice
    return {
        "c": cfg.c,
        "theta0": cfg.theta0,
        "omega0": cfg.omega0,
        "energy": curve.energy,
        "g2": complex(curve.invariants.g2).real,
        "g3": complex(curve.invariants.g3).real,
        "delta": curve.discriminant,
        "omega1": complex(lat.omega1),
        "omega2": complex(lat.omega2),
        "g1": complex(curve.g1),
        "regime": curve.regime.value,
        "period": real_period(curve),
    }


def _config_from_args(args) -> PendulumConfig:
    return PendulumConfig(c=args.c, theta0=args.theta0, omega0=args.omega0)


def cmd_curve(args) -> int:
    if args.replay is not None:
        try:
            with open(args.replay, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise _InputError(f"replay: cannot read file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise _InputError(f"replay: invalid JSON: {exc}") from None
        try:
            cfg = PendulumConfig(c=float(data["c"]),
                                 theta0=float(data["theta0"]),
                                 omega0=float(data["omega0"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise _InputError(f"replay: missing or bad field: {exc}") from None
    else:
        if args.c is None or args.theta0 is None or args.omega0 is None:
            raise _InputError("curve requires --c, --theta0 and --omega0 "
                              "(or --replay FILE)")
        cfg = _config_from_args(args)
    _print_json(_curve_record(build_curve(cfg)))
    return _EXIT_OK


def _trajectory_samples(args) -> np.ndarray:
    if args.t_max <= 0:
        raise _InputError("--t-max must be positive")
    if args.samples < 2:
        raise _InputError("--samples must be at least 2")
    return np.linspace(0.0, args.t_max, args.samples)


def cmd_trajectory(args) -> int:
    cfg = _config_from_args(args)
    ts = _trajectory_samples(args)
    if args.method == "weierstrass":
        curve = build_curve(cfg)
        if curve.regime is Regime.SEPARATRIX:
            raise DegenerateCurve(
                "separatrix initial data: the closed form degenerates; "
                "use --method ode instead")
        traj = sample_trajectory(curve, 0.0, args.t_max, args.samples)
        t, theta, omega, energy = traj.t, traj.theta, traj.omega, traj.energy
    elif args.method == "jacobi":
        theta = np.empty_like(ts)
        omega = np.empty_like(ts)
        for i, tv in enumerate(ts):
            theta[i], omega[i] = jacobi_state(cfg, float(tv))
        t = ts
        energy = omega ** 2 / 2 + 4 * cfg.c * np.cos(theta)
    else:
        run = integrate_scalar(cfg, float(ts[-1]), t_eval=ts)
        traj = run.trajectory
        t, theta, omega, energy = traj.t, traj.theta, traj.omega, traj.energy
    if args.format == "csv":
        _print_csv(t, theta, omega, energy)
    else:
        rows = [{"t": float(a), "theta": float(b), "omega": float(c),
                 "energy": float(d)} for a, b, c, d in zip(t, theta, omega,
                                                           energy)]
        _print_json({"samples": rows})
    return _EXIT_OK


def _is_equilibrium(cfg: PendulumConfig) -> bool:
    return cfg.omega0 == 0.0 and abs(math.sin(cfg.theta0)) < 1e-12


def cmd_validate(args) -> int:
    cfg = _config_from_args(args)
    ts = _trajectory_samples(args)
    settings = IntegratorSettings(rel_tol=args.oracle_tol,
                                  abs_tol=min(1e-12, args.oracle_tol / 100))
    run = integrate_scalar(cfg, float(ts[-1]), settings=settings, t_eval=ts)

    if _is_equilibrium(cfg):
        closed_theta = np.full_like(ts, cfg.theta0)
        closed_drift = 0.0

        def closed_at(t: float) -> float:
            return cfg.theta0
    else:
        curve = build_curve(cfg)
        if curve.regime is Regime.SEPARATRIX:
            raise DegenerateCurve(
                "separatrix initial data: no closed form to validate against")
        e0 = curve.energy
        closed_theta = np.empty_like(ts)
        closed_drift = 0.0
        for i, tv in enumerate(ts):
            th, om = eval_state(curve, float(tv))
            closed_theta[i] = th
            closed_drift = max(closed_drift, abs(
                om * om / 2 + 4 * cfg.c * math.cos(th) - e0))

        def closed_at(t: float) -> float:
            return eval_state(curve, t)[0]

    deviation = max(_wrap_diff(float(a), float(b))
                    for a, b in zip(closed_theta, run.trajectory.theta))

    # residual statistics on a locally unwrapped closed form; the raw
    # angle is discontinuous at +-pi, which would poison the stencil
    h = 1e-4
    res_ts = np.linspace(0.1, float(ts[-1]), 25) if ts[-1] > 0.2 else ts[1:-1]
    residuals = []
    for tv in res_ts:
        base = closed_at(float(tv))

        def f(s: float) -> float:
            return base + math.remainder(closed_at(s) - base, 2 * math.pi)

        residuals.append(residual_check(f, float(tv), h, cfg.c))
    record = {
        "c": cfg.c,
        "theta0": cfg.theta0,
        "omega0": cfg.omega0,
        "t_max": float(ts[-1]),
        "samples": int(args.samples),
        "tol": args.tol,
        "oracle_rel_tol": args.oracle_tol,
        "max_deviation": deviation,
        "closed_energy_drift": closed_drift,
        "oracle_energy_drift": run.energy_drift,
        "residual_max": max(residuals),
        "residual_mean": sum(residuals) / len(residuals),
        "passed": deviation <= args.tol,
    }
    _print_json(record)
    return _EXIT_OK if deviation <= args.tol else _EXIT_VALIDATION


def _parse_matrix_field(data, name: str, n: int) -> np.ndarray:
    if name not in data:
        raise _InputError(f"input-file: missing field '{name}'")
    rows = data[name]
    if not isinstance(rows, list) or len(rows) != n:
        raise _InputError(f"input-file: field '{name}' must be a list of "
                          f"{n} rows")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise _InputError(f"input-file: field '{name}' row {i} must "
                              f"have {n} entries")
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, (int, float)) and
                               not isinstance(x, bool) for x in entry)):
                raise _InputError(f"input-file: field '{name}' entry "
                                  f"({i},{j}) must be a [re, im] pair")
            out[i, j] = complex(entry[0], entry[1])
    dev = float(np.linalg.norm(out - out.conj().T))
    if dev > 1e-10 * max(1.0, float(np.linalg.norm(out))):
        raise _InputError(f"input-file: field '{name}' is not Hermitian "
                          f"(asymmetry {dev:.3e})")
    return out


def _load_matrix_file(path: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise _InputError(f"input-file: cannot read file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise _InputError(f"input-file: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise _InputError("input-file: top level must be a JSON object")
    if "n" not in data:
        raise _InputError("input-file: missing field 'n'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise _InputError("input-file: field 'n' must be a positive integer")
    theta0 = _parse_matrix_field(data, "theta0", n)
    omega0 = _parse_matrix_field(data, "omega0", n)
    return theta0, omega0


def _flatten(m: np.ndarray) -> list:
    return [complex(x) for x in np.asarray(m).ravel()]


def cmd_matrix(args) -> int:
    theta0, omega0 = _load_matrix_file(args.input_file)
    ts = _trajectory_samples(args)
    sol = solve_matrix_pendulum(theta0, omega0, args.c, tol=args.tol)
    theta_rows = []
    omega_rows = []
    energy_rows = []
    for tv in ts:
        th, _ = matrix_theta_at(sol, float(tv))
        theta_rows.append(_flatten(th))
        omega_rows.append(_flatten(matrix_omega_at(sol, float(tv))))
        energy_rows.append(_flatten(matrix_energy(sol, float(tv))))
    record = {
        "n": sol.n,
        "c": float(args.c),
        "commutator_norm": commutator_norm(theta0, omega0),
        "eigenpairs": [_curve_record(cv) for cv in sol.scalar_curves],
        "trajectory": {
            "t": [float(tv) for tv in ts],
            "theta": theta_rows,
            "omega": omega_rows,
            "energy": energy_rows,
        },
    }
    _print_json(record)
    return _EXIT_OK


def cmd_lattice(args) -> int:
    if args.extent < 0:
        raise _InputError("--extent must be nonnegative")
    cfg = _config_from_args(args)
    curve = build_curve(cfg)
    rec = _curve_record(curve)
    lat = curve.lattice
    w1, w2 = complex(lat.omega1), complex(lat.omega2)
    points = [i * w1 + j * w2
              for i in range(-args.extent, args.extent + 1)
              for j in range(-args.extent, args.extent + 1)]
    period = real_period(curve)
    ts = np.linspace(0.0, period, 129)
    q = curve.scale
    path = [q * (float(tv) + complex(curve.g1)) for tv in ts]
    record = {
        "c": cfg.c,
        "theta0": cfg.theta0,
        "omega0": cfg.omega0,
        "g2": rec["g2"],
        "g3": rec["g3"],
        "omega1": w1,
        "omega2": w2,
        "g1": complex(curve.g1),
        "extent": int(args.extent),
        "points": points,
        "cell": [complex(0), w1, w1 + w2, w2],
        "path": {
            "t": [float(tv) for tv in ts],
            "z": path,
        },
    }
    _print_json(record)
    return _EXIT_OK


def _add_config_flags(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--c", type=float, required=required,
                   help="coupling constant (nonzero)")
    p.add_argument("--theta0", type=float, required=required,
                   help="initial angle")
    p.add_argument("--omega0", type=float, required=required,
                   help="initial angular velocity")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elliptic-pendulum",
        description="Closed-form pendulum trajectories through the "
                    "Weierstrass elliptic function")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="elliptic curve data for one config")
    _add_config_flags(p, required=False)
    p.add_argument("--replay", metavar="FILE", default=None,
                   help="re-emit the curve described by a previously "
                        "saved curve JSON record")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("trajectory", help="sampled trajectory")
    _add_config_flags(p, required=True)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--method", choices=("weierstrass", "jacobi", "ode"),
                   default="weierstrass")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("validate",
                       help="closed form vs adaptive integrator report")
    _add_config_flags(p, required=True)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-6,
                   help="pass/fail threshold on the max angle deviation")
    p.add_argument("--oracle-tol", type=float, default=1e-10,
                   help="relative tolerance handed to the integrator")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("matrix", help="commuting Hermitian matrix pendulum")
    p.add_argument("--input-file", required=True,
                   help="JSON file with fields n, theta0, omega0; complex "
                        "entries as [re, im] pairs")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-10,
                   help="commutator tolerance")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("lattice", help="period lattice and trajectory path")
    _add_config_flags(p, required=True)
    p.add_argument("--extent", type=int, default=2,
                   help="emit lattice points n w1 + m w2 with |n|,|m| <= "
                        "extent")
    p.set_defaults(func=cmd_lattice)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except (UnsupportedInitialAngle, UnsupportedParameter, ZeroCoupling,
            DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except DegenerateCurve as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DEGENERATE
    except NonCommutingInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_NONCOMMUTING


if __name__ == "__main__":
    sys.exit(main())

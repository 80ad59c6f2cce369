"""Weierstrass elliptic machinery in double precision.

Cubic roots of 4x^3 - g2 x - g3, Carlson symmetric integrals, lattice
construction from real invariants, evaluation of the Weierstrass p-function
and its derivative, inversion of p, and the Jacobi amplitude.

The p-function is evaluated by argument reduction to the fundamental cell,
a truncated Laurent series near the origin, and the algebraic duplication
formula otherwise.  Internally the lattice basis is Lagrange-reduced first:
the half-period pair for discriminant < 0 can be badly skewed, and the
series radius must be measured against the true shortest lattice vector,
not against whichever generators were emitted.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import (
    DegenerateCurve,
    NonConvergence,
    NotOnCurve,
    PoleAtInput,
    UnsupportedParameter,
)

_SERIES_TERMS = 48
# Fraction of the shortest lattice vector inside which the Laurent series is
# summed directly.  0.62 keeps the truncation error below 1e-19 at 48 terms
# while needing at most one duplication per evaluation on reduced bases.
_SERIES_RADIUS = 0.62
_POLE_TOL = 1e-8
_RF_CAP = 100
_RF_SPREAD = 1e-14


class Invariants(NamedTuple):
    """Invariant pair (g2, g3) of the curve y^2 = 4x^3 - g2 x - g3."""

    g2: complex
    g3: complex


def discriminant(g2: complex, g3: complex) -> complex:
    """Return the curve discriminant g2^3 - 27 g3^2."""
    return g2 * g2 * g2 - 27 * g3 * g3


def is_degenerate(g2: complex, g3: complex) -> bool:
    """Scale-aware separatrix test: |disc| <= 1e-9 (1 + |g2|^3)."""
    return abs(discriminant(g2, g3)) <= 1e-9 * (1 + abs(g2) ** 3)


def solve_cubic(g2: complex, g3: complex) -> tuple[complex, complex, complex]:
    """Roots of 4x^3 - g2 x - g3 = 0, sorted by descending (Re, Im).

    Cardano's formula on the monic depressed form, taking the
    larger-magnitude cube-root branch to dodge cancellation, then two Newton
    polishing steps per root.  Repeated roots are returned as-is; callers
    that need a nonsingular curve gate on the discriminant.
    """
    g2 = complex(g2)
    g3 = complex(g3)
    p = -g2 / 4
    q = -g3 / 4
    disc = (q / 2) ** 2 + (p / 3) ** 3
    sq = cmath.sqrt(disc)
    u3a = -q / 2 + sq
    u3b = -q / 2 - sq
    u3 = u3a if abs(u3a) >= abs(u3b) else u3b
    if abs(u3) == 0:
        if abs(q) == 0:
            return (0j, 0j, 0j)
        u = (-q) ** (1 / 3)
    else:
        u = u3 ** (1 / 3)
    w = complex(-0.5, math.sqrt(3) / 2)
    out = []
    for k in range(3):
        uk = u * w ** k
        r = uk - p / (3 * uk) if abs(uk) > 0 else 0j
        for _ in range(2):
            f = 4 * r ** 3 - g2 * r - g3
            fp = 12 * r ** 2 - g2
            if abs(fp) > 1e-30:
                r = r - f / fp
        out.append(r)
    out.sort(key=lambda e: (-e.real, -e.imag))
    return tuple(out)


def carlson_rf(x: complex, y: complex, z: complex) -> complex:
    """Carlson's symmetric integral R_F(x, y, z).

    Standard duplication iteration, stopping when the pairwise argument
    spread falls below 1e-14 relative, then a fifth-order Taylor tail.
    At most one argument may be zero.
    """
    x, y, z = complex(x), complex(y), complex(z)
    if (x == 0) + (y == 0) + (z == 0) > 1:
        raise UnsupportedParameter("carlson_rf: at most one argument may be zero")
    for _ in range(_RF_CAP):
        scale = max(abs(x), abs(y), abs(z))
        spread = max(abs(x - y), abs(y - z), abs(z - x))
        if spread <= _RF_SPREAD * scale:
            break
        sx, sy, sz = cmath.sqrt(x), cmath.sqrt(y), cmath.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4
    else:
        raise NonConvergence("carlson_rf: duplication failed to converge")
    mean = (x + y + z) / 3
    dx = 1 - x / mean
    dy = 1 - y / mean
    dz = -dx - dy
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1 - e2 / 10 + e3 / 14 + e2 * e2 / 24 - 3 * e2 * e3 / 44) / cmath.sqrt(mean)


def _lagrange_reduce(b1: complex, b2: complex) -> tuple[complex, complex]:
    """Gauss/Lagrange reduction of a rank-2 lattice basis in the plane."""
    if abs(b1) > abs(b2):
        b1, b2 = b2, b1
    for _ in range(64):
        mu = round((b2.real * b1.real + b2.imag * b1.imag) / abs(b1) ** 2)
        b2 = b2 - mu * b1
        if abs(b2) >= abs(b1):
            break
        b1, b2 = b2, b1
    return b1, b2


def _laurent_coefficients(g2: complex, g3: complex,
                          nterms: int = _SERIES_TERMS) -> tuple[complex, ...]:
    """Coefficients c_k of p(z) = 1/z^2 + sum_{k>=2} c_k z^(2k-2)."""
    c = [0j] * (nterms + 1)
    c[2] = g2 / 20
    c[3] = g3 / 28
    for k in range(4, nterms + 1):
        acc = 0j
        for m in range(2, k - 1):
            acc += c[m] * c[k - m]
        c[k] = 3 * acc / ((2 * k + 1) * (k - 3))
    return tuple(c)


@dataclass(frozen=True)
class Lattice:
    """Period lattice of a Weierstrass curve.

    omega1/omega2 are the emitted generators (omega1 real for real
    invariants, normalized so Im(omega2/omega1) > 0).  A Lagrange-reduced
    copy of the basis, the Laurent coefficients, and the cubic roots used
    by the evaluator are precomputed at construction.
    """

    omega1: complex
    omega2: complex
    g2: complex
    g3: complex
    discriminant: complex
    roots: tuple[complex, complex, complex]
    lmin: float
    _r1: complex = field(repr=False)
    _r2: complex = field(repr=False)
    _minv: tuple[float, float, float, float] = field(repr=False)
    _einv: tuple[float, float, float, float] = field(repr=False)
    _coeffs: tuple[complex, ...] = field(repr=False)

    @property
    def invariants(self) -> Invariants:
        return Invariants(self.g2, self.g3)

    @staticmethod
    def from_generators(omega1: complex, omega2: complex,
                        g2: complex, g3: complex) -> "Lattice":
        """Assemble a lattice record from generators and known invariants."""
        omega1 = complex(omega1)
        omega2 = complex(omega2)
        tau = omega2 / omega1
        if abs(tau.imag) <= 1e-10:
            raise DegenerateCurve("lattice generators are collinear")
        if tau.imag < 0:
            omega2 = -omega2
        r1, r2 = _lagrange_reduce(omega1, omega2)
        det = r1.real * r2.imag - r2.real * r1.imag
        minv = (r2.imag / det, -r2.real / det, -r1.imag / det, r1.real / det)
        edet = omega1.real * omega2.imag - omega2.real * omega1.imag
        einv = (omega2.imag / edet, -omega2.real / edet,
                -omega1.imag / edet, omega1.real / edet)
        return Lattice(
            omega1=omega1, omega2=omega2,
            g2=complex(g2), g3=complex(g3),
            discriminant=discriminant(g2, g3),
            roots=solve_cubic(g2, g3),
            lmin=abs(r1),
            _r1=r1, _r2=r2, _minv=minv, _einv=einv,
            _coeffs=_laurent_coefficients(g2, g3),
        )


def half_periods(g2: float, g3: float) -> Lattice:
    """Construct the period lattice for real invariants.

    For discriminant > 0 (three real roots e1 > e2 > e3) the lattice is
    rectangular: omega1 = 2 R_F(0, e1-e2, e1-e3) real and omega2 purely
    imaginary.  For discriminant < 0 (one real root) omega1 is real and
    omega2 = omega1/2 + i beta.  Raises DegenerateCurve when
    |discriminant| <= 1e-9 (1 + |g2|^3); complex invariants are rejected
    (the pendulum pipeline only produces real pairs).
    """
    g2c = complex(g2)
    g3c = complex(g3)
    if g2c.imag != 0 or g3c.imag != 0:
        raise UnsupportedParameter("half_periods requires real invariants")
    if is_degenerate(g2c, g3c):
        raise DegenerateCurve("vanishing discriminant: no finite lattice")
    e1, e2, e3 = solve_cubic(g2c, g3c)
    disc = discriminant(g2c, g3c).real
    if disc > 0:
        h = carlson_rf(0, e1 - e2, e1 - e3)
        hp = carlson_rf(0, e1 - e3, e2 - e3)
        omega1 = complex(2 * h.real, 0.0)
        omega2 = complex(0.0, 2 * abs(hp))
    else:
        er = min((e1, e2, e3), key=lambda r: abs(r.imag))
        ca, cb = [r for r in (e1, e2, e3) if r is not er]
        h = carlson_rf(0, er - ca, er - cb)
        hp = carlson_rf(0, ca - er, cb - er)
        omega1 = complex(2 * h.real, 0.0)
        omega2 = complex(h.real, abs(hp))
    return Lattice.from_generators(omega1, omega2, g2c, g3c)


def reduce_to_fundamental(z: complex, lat: Lattice) -> complex:
    """Translate z by lattice vectors into coordinates in [-1/2, 1/2).

    Coordinates are taken with respect to the emitted generators
    (omega1, omega2); the p-function is unchanged.
    """
    z = complex(z)
    a, b, c, d = lat._einv
    x = a * z.real + b * z.imag
    y = c * z.real + d * z.imag
    x -= math.floor(x + 0.5)
    y -= math.floor(y + 0.5)
    return x * lat.omega1 + y * lat.omega2


def _reduce_minnorm(z: complex, lat: Lattice) -> complex:
    """Minimum-norm representative of z modulo the lattice.

    Rounds coordinates in the reduced basis, then scans the 3x3 block of
    neighboring representatives; for a Lagrange-reduced basis that block
    always contains the shortest one.
    """
    a, b, c, d = lat._minv
    x = a * z.real + b * z.imag
    y = c * z.real + d * z.imag
    x -= math.floor(x + 0.5)
    y -= math.floor(y + 0.5)
    zr = complex(x * lat._r1.real + y * lat._r2.real,
                 x * lat._r1.imag + y * lat._r2.imag)
    best = zr
    for n in (-1, 0, 1):
        for m in (-1, 0, 1):
            cand = zr - n * lat._r1 - m * lat._r2
            if abs(cand) < abs(best):
                best = cand
    return best


def _series_pair(z: complex, coeffs: tuple[complex, ...]) -> tuple[complex, complex]:
    """Laurent series for (p, p') at small z, summed by Horner from the tail."""
    z2 = z * z
    top = len(coeffs) - 1
    acc = coeffs[top]
    for k in range(top - 1, 1, -1):
        acc = acc * z2 + coeffs[k]
    p = 1 / z2 + z2 * acc
    accd = (2 * top - 2) * coeffs[top]
    for k in range(top - 1, 1, -1):
        accd = accd * z2 + (2 * k - 2) * coeffs[k]
    pp = -2 / (z2 * z) + z * accd
    return p, pp


def _duplicate(p: complex, pp: complex, lat: Lattice) -> tuple[complex, complex]:
    """One step of the duplication formula.

    p(2z) is formed from p alone through the factored curve polynomial,
    which stays well-conditioned where the p' series self-cancels; p'(2z)
    then follows from the tangent-line (group-law) identity.
    """
    e1, e2, e3 = lat.roots
    ppp = 6 * p * p - lat.g2 / 2
    den = (p - e1) * (p - e2) * (p - e3)
    p2 = -2 * p + ppp * ppp / (16 * den)
    slope = ppp / (2 * pp)
    pp2 = -pp - 2 * slope * (p2 - p)
    return p2, pp2


def wp_pair(z: complex, lat: Lattice) -> tuple[complex, complex]:
    """(p(z), p'(z)) by reduction, Laurent series, and duplication.

    Cheaper than separate wp/wp_prime calls when both values are needed,
    which is the common case for trajectory evaluation.
    """
    zr = _reduce_minnorm(complex(z), lat)
    if abs(zr) < _POLE_TOL:
        raise PoleAtInput(f"wp evaluated within {_POLE_TOL} of a lattice point")
    radius = _SERIES_RADIUS * lat.lmin
    k = 0
    while abs(zr) / (1 << k) > radius:
        k += 1
    p, pp = _series_pair(zr / (1 << k), lat._coeffs)
    for _ in range(k):
        p, pp = _duplicate(p, pp, lat)
    return p, pp


def wp(z: complex, lat: Lattice) -> complex:
    """Weierstrass p-function on the given lattice."""
    return wp_pair(z, lat)[0]


def wp_prime(z: complex, lat: Lattice) -> complex:
    """Derivative p'(z), satisfying p'^2 = 4p^3 - g2 p - g3."""
    return wp_pair(z, lat)[1]


def wp_inverse(w: complex, wprime_target: complex, lat: Lattice) -> complex:
    """Point z in the fundamental domain with p(z) = w, p'(z) ~ wprime_target.

    The magnitude of z comes from Carlson's R_F at the root differences
    (the incomplete integral of 1/sqrt(4t^3 - g2 t - g3) from w to
    infinity); Newton steps polish p(z) = w and the sign branch is fixed
    by matching p'.  Raises NotOnCurve if (w, w') violates the curve
    equation beyond 1e-6 (1 + |w|^3).
    """
    w = complex(w)
    wprime_target = complex(wprime_target)
    e1, e2, e3 = lat.roots
    rhs = 4 * w ** 3 - lat.g2 * w - lat.g3
    if abs(wprime_target ** 2 - rhs) > 1e-6 * (1 + abs(w) ** 3):
        raise NotOnCurve("(w, w') does not satisfy y^2 = 4x^3 - g2 x - g3")
    z = carlson_rf(w - e1, w - e2, w - e3)
    for _ in range(3):
        try:
            p, pp = wp_pair(z, lat)
        except PoleAtInput:
            break
        if abs(pp) < 1e-12 * (1 + abs(p)):
            break
        step = (p - w) / pp
        if abs(step) > 0.5 * lat.lmin:
            step *= 0.5 * lat.lmin / abs(step)
        z = z - step
    p, pp = wp_pair(z, lat)
    if abs(pp - wprime_target) > abs(-pp - wprime_target):
        z = -z
    return reduce_to_fundamental(z, lat)


def lattice_invariants(lat: Lattice, n: int = 128) -> tuple[complex, complex]:
    """(g2, g3) from truncated Eisenstein sums over the lattice.

    Sums 60 sum(1/w^4) and 140 sum(1/w^6) over 0 < max(|i|,|j|) <= n and
    <= 2n, then Richardson-extrapolates the square-shell truncation tails
    (which shrink like n^-2 and n^-4 respectively).  Independent of the
    series/duplication evaluator; used to cross-check stored invariants.
    """
    w1, w2 = lat._r1, lat._r2

    def shells(nmax: int) -> tuple[complex, complex]:
        s4 = 0j
        s6 = 0j
        for i in range(-nmax, nmax + 1):
            for j in range(-nmax, nmax + 1):
                if i == 0 and j == 0:
                    continue
                lam = i * w1 + j * w2
                inv2 = 1 / (lam * lam)
                inv4 = inv2 * inv2
                s4 += inv4
                s6 += inv4 * inv2
        return s4, s6

    s4a, s6a = shells(n)
    s4b, s6b = shells(2 * n)
    g2 = 60 * (4 * s4b - s4a) / 3
    g3 = 140 * (16 * s6b - s6a) / 15
    return g2, g3


def jacobi_am(u: float, m: float) -> float:
    """Jacobi amplitude am(u | m) in the parameter convention, m < 1.

    Computed by the arithmetic-geometric mean with the standard descending
    phase recursion, continuous and unwrapped in u.  Parameters m < 0 are
    mapped into (0, 1) by the negative-parameter transformation first.
    Raises UnsupportedParameter for m >= 1.
    """
    if m >= 1:
        raise UnsupportedParameter("jacobi_am requires parameter m < 1")
    if m == 0:
        return float(u)
    if m < 0:
        # negative-parameter transformation: with mu = -m/(1-m) in (0,1) and
        # kappa = sqrt(1-m), tan am(u|m) = tan am(kappa u|mu) / kappa; the
        # winding of the auxiliary amplitude carries over branch by branch
        mu = -m / (1 - m)
        kappa = math.sqrt(1 - m)
        phi = jacobi_am(kappa * u, mu)
        base = math.atan2(math.sin(phi) / kappa, math.cos(phi))
        return base + math.pi * round((phi - base) / math.pi)
    # AGM ladder for 0 < m < 1
    a = 1.0
    b = math.sqrt(1 - m)
    c = math.sqrt(m)
    avals = [a]
    cvals = [c]
    for _ in range(64):
        a, b, c = (a + b) / 2, math.sqrt(a * b), (a - b) / 2
        avals.append(a)
        cvals.append(c)
        if abs(c) <= 4e-16 * a:
            break
    else:
        raise NonConvergence("jacobi_am: AGM failed to converge")
    n = len(avals) - 1
    phi = (1 << n) * avals[n] * u
    for i in range(n, 0, -1):
        s = cvals[i] / avals[i] * math.sin(phi)
        s = min(1.0, max(-1.0, s))
        phi = (phi + math.asin(s)) / 2
    return phi

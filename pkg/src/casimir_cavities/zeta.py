"""Zeta-regularized lattice sums and the pyramid vacuum energy.

The central tool is the Epstein zeta function of a small positive
definite form,

    Z_Q(s) = sum'_{n in Z^d} Q[n]^(-s),

continued to all s (one simple pole at s = d/2) through the incomplete
gamma (Ewald) decomposition: the Mellin integral is split at a free
parameter lambda, the theta functional equation turns the small-t piece
into a dual-lattice sum, and both remaining sums converge like
exp(-pi lambda Q[n]).  The result must not depend on lambda, which is
the built-in self-check.

On top of the engine: octant/quadrant sums by inclusion-exclusion, the
three component energies of the pyramid formula, the published energy
combination, and an independently derived combination obtained by
summing over the nine-plane boundary union with every lattice point
counted exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import scipy.special as sc

from .errors import InputError, PoleError
from .symmetry import full_group

_T_MAX = 46.0  # exp(-46) ~ 1e-20: lattice cutoff for the Ewald sums


@dataclass(frozen=True)
class QuadraticForm:
    """Positive definite symmetric form with exact rational entries."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        d = len(rows)
        if d not in (1, 2, 3) or any(len(r) != d for r in rows):
            raise InputError("form must be 1x1, 2x2 or 3x3")
        for i in range(d):
            for j in range(d):
                if rows[i][j] != rows[j][i]:
                    raise InputError("form must be symmetric")
        # leading principal minors, exactly
        for k in range(1, d + 1):
            if _frac_det([r[:k] for r in rows[:k]]) <= 0:
                raise InputError("form must be positive definite")

    @classmethod
    def diagonal(cls, coeffs) -> "QuadraticForm":
        c = [Fraction(v) for v in coeffs]
        d = len(c)
        return cls(tuple(tuple(c[i] if i == j else Fraction(0) for j in range(d))
                         for i in range(d)))

    @classmethod
    def identity(cls, dim: int) -> "QuadraticForm":
        return cls.diagonal([1] * dim)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def is_diagonal(self) -> bool:
        return all(self.entries[i][j] == 0
                   for i in range(self.dim) for j in range(self.dim) if i != j)

    def det(self) -> Fraction:
        return _frac_det(self.entries)

    def inverse(self) -> "QuadraticForm":
        return QuadraticForm(_frac_inv(self.entries))

    def matrix(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])


def _frac_det(rows) -> Fraction:
    d = len(rows)
    if d == 1:
        return rows[0][0]
    if d == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    return (rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]))


def _frac_inv(rows):
    d = len(rows)
    det = _frac_det(rows)
    if d == 1:
        return ((1 / rows[0][0],),)
    if d == 2:
        a, b = rows[0]
        c, e = rows[1]
        return ((e / det, -b / det), (-c / det, a / det))
    cof = [[Fraction(0)] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            sub = [[rows[r][c] for c in range(3) if c != j]
                   for r in range(3) if r != i]
            sign = 1 if (i + j) % 2 == 0 else -1
            cof[j][i] = sign * _frac_det(sub) / det
    return tuple(tuple(r) for r in cof)


@dataclass(frozen=True)
class RegularizedValue:
    """Continued value plus how it was obtained and a rough error bound."""

    value: float
    method: str  # "ewald" | "functional" | "direct"
    est_error: float

    def __post_init__(self):
        if self.est_error < 0:
            raise InputError("error estimate must be nonnegative")
        if self.method not in ("ewald", "functional", "direct", "exact"):
            raise InputError(f"unknown method {self.method!r}")

    def __float__(self):
        return self.value


@lru_cache(maxsize=4096)
def zeta_r(s: float) -> float:
    """Riemann zeta at real s != 1 (analytic continuation included)."""
    if abs(s - 1.0) < 1e-12:
        raise PoleError("Riemann zeta pole at s = 1", residue=1.0)
    return float(mpmath.zeta(s))


def _upper_gamma(a: float, x: np.ndarray) -> np.ndarray:
    """Upper incomplete gamma of real order a (any sign) at x > 0."""
    x = np.asarray(x, dtype=float)
    if a > 0:
        return sc.gammaincc(a, x) * sc.gamma(a)
    if abs(a - round(a)) < 1e-12:
        n_steps = -int(round(a))
        g = sc.exp1(x)
        order = 0.0
    else:
        n_steps = int(math.floor(-a)) + 1
        order = a + n_steps  # in (0, 1)
        g = sc.gammaincc(order, x) * sc.gamma(order)
    for _ in range(n_steps):
        order -= 1.0
        g = (g - x**order * np.exp(-x)) / order
    return g


def _lattice_values(Q: QuadraticForm, bound: float) -> np.ndarray:
    """Values Q[n] over nonzero integer n with Q[n] <= bound, fixed order."""
    qinv = Q.inverse().matrix()
    ranges = [np.arange(-int(math.floor(math.sqrt(bound * qinv[i, i]))) - 1,
                        int(math.floor(math.sqrt(bound * qinv[i, i]))) + 2)
              for i in range(Q.dim)]
    grid = np.array(np.meshgrid(*ranges, indexing="ij")).reshape(Q.dim, -1).T
    vals = np.einsum("ni,ij,nj->n", grid, Q.matrix(), grid)
    return vals[(vals > 0) & (vals <= bound + 1e-9)]


def epstein_zeta(Q: QuadraticForm, s: float, lam: float = 1.0,
                 method: str = "ewald") -> RegularizedValue:
    """Continued lattice sum sum' Q[n]^(-s).

    lam is the Ewald split point; any value in ~[0.1, 10] must give the
    same answer to rounding.  method "functional" evaluates through the
    reflection s -> d/2 - s as an independent route, "direct" performs
    plain summation plus a smooth tail and is only allowed well inside
    the convergent region s > d/2.
    """
    d = Q.dim
    s = float(s)
    if abs(s - d / 2.0) < 1e-12:
        res = math.pi ** (d / 2.0) / (math.gamma(d / 2.0) * math.sqrt(float(Q.det())))
        raise PoleError(f"Epstein zeta pole at s = {d / 2}", residue=res)
    if lam <= 0:
        raise InputError("split parameter must be positive")

    if method == "direct":
        return _epstein_direct(Q, s)
    if method == "functional":
        inner = epstein_zeta(Q.inverse(), d / 2.0 - s, lam=lam, method="ewald")
        factor = (math.pi ** (2 * s - d / 2.0) / math.sqrt(float(Q.det()))
                  * sc.gamma(d / 2.0 - s) * sc.rgamma(s))
        return RegularizedValue(factor * inner.value, "functional",
                                abs(factor) * inner.est_error + 1e-14 * abs(factor * inner.value))
    if method != "ewald":
        raise InputError(f"unknown method {method!r}")

    if s == 0.0:
        return RegularizedValue(-1.0, "ewald", 0.0)

    detq = float(Q.det())
    qi = Q.inverse()
    direct_vals = _lattice_values(Q, _T_MAX / (math.pi * lam))
    dual_vals = _lattice_values(qi, _T_MAX * lam / math.pi)
    a_sum = float(np.sum((math.pi * direct_vals) ** (-s)
                         * _upper_gamma(s, math.pi * lam * direct_vals)))
    b_ord = d / 2.0 - s
    b_sum = float(np.sum((math.pi * dual_vals) ** (-b_ord)
                         * _upper_gamma(b_ord, math.pi * dual_vals / lam)))
    bracket = (a_sum + b_sum / math.sqrt(detq)
               + lam ** (s - d / 2.0) / ((s - d / 2.0) * math.sqrt(detq))
               - lam ** s / s)
    value = math.pi ** s * sc.rgamma(s) * bracket
    est = abs(value) * 1e-14 + math.exp(-_T_MAX)
    return RegularizedValue(value, "ewald", est)


def _epstein_direct(Q: QuadraticForm, s: float) -> RegularizedValue:
    d = Q.dim
    if s <= d / 2.0 + 0.25:
        raise InputError("direct summation requested outside the convergent region")
    cutoff = (4.0e6 ** (1.0 / d) / 2.0) ** 2  # grid of roughly 4M points
    vals = _lattice_values(Q, cutoff)
    partial = float(np.sum(vals ** (-s)))
    count = len(vals)
    # Abel tail with the smooth point count c * t^(d/2)
    c = math.pi ** (d / 2.0) / (math.gamma(d / 2.0 + 1.0) * math.sqrt(float(Q.det())))
    tail = s * c * cutoff ** (d / 2.0 - s) / (s - d / 2.0) - count * cutoff ** (-s)
    fluct = {1: 2.0, 2: 8.0 * cutoff ** (1.0 / 3.0), 3: 8.0 * cutoff ** (2.0 / 3.0)}[d]
    return RegularizedValue(partial + tail, "direct",
                            fluct * cutoff ** (-s) + 1e-14 * abs(partial))


def restricted_quadrant_sum(Q: QuadraticForm, s: float,
                            lam: float = 1.0) -> RegularizedValue:
    """Open-quadrant sum sum_{n,m >= 1} Q[(n,m)]^(-s), continued.

    Obtained from the full-lattice sum by stripping the two half-axis
    series (each a scaled Riemann zeta) and dividing by the four
    reflected quadrants.  Q must be 2x2 diagonal so that reflections
    leave it invariant.
    """
    if Q.dim != 2 or not Q.is_diagonal:
        raise InputError("quadrant sums need a diagonal 2x2 form")
    z = epstein_zeta(Q, s, lam=lam)
    q1 = float(Q.entries[0][0])
    q2 = float(Q.entries[1][1])
    zh = zeta_r(2 * s)
    value = (z.value - 2.0 * q1 ** (-s) * zh - 2.0 * q2 ** (-s) * zh) / 4.0
    return RegularizedValue(value, z.method, z.est_error / 4.0 + 1e-15 * abs(value))


def restricted_octant_sum(s: float, lam: float = 1.0) -> RegularizedValue:
    """Open-octant sum sum_{n,m,k >= 1} (n^2+m^2+k^2)^(-s), continued.

    Inclusion-exclusion over the coordinate hyperplanes of Z^3: eight
    open octants, twelve open quadrants on the coordinate planes, six
    half axes.
    """
    z3 = epstein_zeta(QuadraticForm.identity(3), s, lam=lam)
    s2 = restricted_quadrant_sum(QuadraticForm.identity(2), s, lam=lam)
    zh = zeta_r(2 * s)
    value = (z3.value - 12.0 * s2.value - 6.0 * zh) / 8.0
    err = (z3.est_error + 12.0 * s2.est_error) / 8.0 + 1e-15 * abs(value)
    return RegularizedValue(value, z3.method, err)


def component_energies(a: float) -> tuple[float, float, float]:
    """The three building-block energies entering the pyramid formula.

    E1: cubic-box triple sum; E2: rectangle sum with side ratio 1:1/sqrt(2);
    E3: the one-dimensional series, equal to -pi/(24 a) exactly.
    """
    if a <= 0:
        raise InputError("cavity size a must be positive")
    e1 = (math.pi / (2 * a)) * restricted_octant_sum(-0.5).value
    e2 = (math.pi / (2 * a)) * restricted_quadrant_sum(
        QuadraticForm.diagonal([1, 2]), -0.5).value
    e3 = -math.pi / (24.0 * a)
    return e1, e2, e3


def pyramid_energy_published(a: float) -> float:
    """The printed linear combination (1/6) E1 - (1/2) E2 - (6+4 sqrt2)/16 E3."""
    e1, e2, e3 = component_energies(a)
    return e1 / 6.0 - e2 / 2.0 - (6.0 + 4.0 * math.sqrt(2.0)) / 16.0 * e3


# ---------------------------------------------------------------------------
# boundary union of the discrete quotient


def _canonical_direction(v) -> tuple[int, int, int]:
    g = math.gcd(math.gcd(abs(v[0]), abs(v[1])), abs(v[2]))
    w = tuple(int(c // g) for c in v)
    for c in w:
        if c != 0:
            return w if c > 0 else tuple(-x for x in w)
    raise InputError("zero direction")


@lru_cache(maxsize=1)
def boundary_structure():
    """Planes and intersection lines of the quotient boundary set.

    The boundary of the index-space domain consists of three planes
    (second index zero, first = second, first = third); their orbit
    under the 48-element group gives the full union.  Returns
    (planes, lines): planes as (normal, gram 2x2 tuple), lines as
    (direction, squared length, multiplicity = number of planes
    containing the line).  Everything exact integers.
    """
    base = [(0, 1, 0), (1, -1, 0), (1, 0, -1)]
    normals = set()
    for g in full_group():
        for v in base:
            normals.add(_canonical_direction(g.apply(v)))
    planes = []
    for v in sorted(normals):
        planes.append((v, _plane_gram(v)))
    directions = set()
    for i, (u, _) in enumerate(planes):
        for w, _ in planes[i + 1:]:
            cross = (u[1] * w[2] - u[2] * w[1],
                     u[2] * w[0] - u[0] * w[2],
                     u[0] * w[1] - u[1] * w[0])
            if any(cross):
                directions.add(_canonical_direction(cross))
    lines = []
    for dvec in sorted(directions):
        mult = sum(1 for v, _ in planes
                   if v[0] * dvec[0] + v[1] * dvec[1] + v[2] * dvec[2] == 0)
        lines.append((dvec, sum(c * c for c in dvec), mult))
    return tuple(planes), tuple(lines)


def _plane_gram(normal) -> tuple[tuple[int, int], tuple[int, int]]:
    """Gram matrix of a basis of the integer lattice in the plane n.x = 0."""
    candidates = []
    for a in range(-2, 3):
        for b in range(-2, 3):
            for c in range(-2, 3):
                v = (a, b, c)
                if any(v) and a * normal[0] + b * normal[1] + c * normal[2] == 0:
                    candidates.append(v)
    candidates.sort(key=lambda v: (v[0] ** 2 + v[1] ** 2 + v[2] ** 2, v))
    norm2 = sum(c * c for c in normal)
    b1 = candidates[0]
    for b2 in candidates[1:]:
        cross = (b1[1] * b2[2] - b1[2] * b2[1],
                 b1[2] * b2[0] - b1[0] * b2[2],
                 b1[0] * b2[1] - b1[1] * b2[0])
        # full-index basis of the plane lattice: |b1 x b2|^2 = |normal|^2
        if sum(c * c for c in cross) == norm2:
            dot = sum(p * q for p, q in zip(b1, b2))
            return ((sum(c * c for c in b1), dot), (dot, sum(c * c for c in b2)))
    raise InputError(f"no lattice basis found for plane normal {normal}")


def boundary_union_sum(s: float, lam: float = 1.0) -> RegularizedValue:
    """Regularized sum of |n|^(-2s) over the nine-plane union, each point once.

    Plane sums counted per plane, then every intersection line removed
    as many extra times as it was counted: a point lying in nu planes
    appears nu times in the plane sums and must keep weight one.
    """
    planes, lines = boundary_structure()
    zh = zeta_r(2 * s)
    value = 0.0
    err = 0.0
    for _, gram in planes:
        z = epstein_zeta(QuadraticForm(tuple(tuple(Fraction(v) for v in row)
                                             for row in gram)), s, lam=lam)
        value += z.value
        err += z.est_error
    for _, d2, mult in lines:
        value -= (mult - 1) * 2.0 * float(d2) ** (-s) * zh
    return RegularizedValue(value, "ewald", err + 1e-15 * abs(value))


def boundary_union_count(r2max: int) -> int:
    """Exact count of boundary-union points with 0 < |n|^2 <= r2max.

    Same inclusion-exclusion as the regularized sum, with unit weights;
    validated against brute-force set union in the tests.
    """
    planes, lines = boundary_structure()
    total = 0
    for _, gram in planes:
        g = np.array(gram, dtype=np.int64)
        n = int(math.isqrt(r2max)) + 1
        rng = np.arange(-n, n + 1)
        pts = np.array(np.meshgrid(rng, rng, indexing="ij")).reshape(2, -1).T
        vals = np.einsum("ni,ij,nj->n", pts, g, pts)
        total += int(np.count_nonzero((vals > 0) & (vals <= r2max)))
    for _, d2, mult in lines:
        tmax = int(math.isqrt(r2max // d2))
        total -= (mult - 1) * 2 * tmax
    return total


def _coefficient_derivation():
    """Exact coefficients of the two energy combinations, via sympy.

    Decomposes the full-lattice sum and the boundary-union sum over the
    basis (octant sum, 1:2 quadrant sum, square quadrant sum, Riemann
    zeta) at the energy exponent, where 2^(1/2) and 3^(1/2) appear from
    the line and diagonal-plane norms.
    """
    import sympy as sp

    s3, s2_12, s2_11, zh = sp.symbols("s3 s2_12 s2_11 zh")
    r2, r3 = sp.sqrt(2), sp.sqrt(3)
    z3 = 8 * s3 + 12 * s2_11 + 6 * zh
    z2 = {  # full-lattice 2d sums by gram determinant, at s = -1/2
        1: 4 * s2_11 + 4 * zh,
        2: 4 * s2_12 + 2 * zh + 2 * r2 * zh,
    }
    planes, lines = boundary_structure()
    union = 0
    for _, gram in planes:
        det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]
        union += z2[det]
    for _, d2, mult in lines:
        union -= (mult - 1) * 2 * sp.sqrt(d2) * zh
    diff = sp.expand(z3 - union)
    # E = (pi/96a) * diff and E_i = (pi/2a) * basis_i: coefficient = c/48
    coeffs = {
        "E1": sp.nsimplify(diff.coeff(s3) / 48),
        "E2": sp.nsimplify(diff.coeff(s2_12) / 48),
        "E3": sp.nsimplify(diff.coeff(zh).subs({r2: sp.sqrt(2), r3: sp.sqrt(3)}) / 48),
        "square_quadrant": sp.nsimplify(diff.coeff(s2_11) / 48),
    }
    published = {
        "E1": sp.Rational(1, 6),
        "E2": -sp.Rational(1, 2),
        "E3": -(6 + 4 * sp.sqrt(2)) / 16,
    }
    return coeffs, published


def pyramid_energy_oracle(a: float) -> tuple[float, dict]:
    """Pyramid energy from the union-counted quotient sum, plus a report.

    Returns the energy (pi/96a)(Z_3 - union) and a coefficient table
    comparing the combination it implies against the published one.
    The implied E1 and E2 coefficients are derived in exact arithmetic.
    """
    if a <= 0:
        raise InputError("cavity size a must be positive")
    import sympy as sp

    z3 = epstein_zeta(QuadraticForm.identity(3), -0.5)
    union = boundary_union_sum(-0.5)
    energy = math.pi / (96.0 * a) * (z3.value - union.value)
    derived, published = _coefficient_derivation()
    e1, e2, e3 = component_energies(a)
    report = {
        "energy_oracle": energy,
        "energy_published": pyramid_energy_published(a),
        "components": {"E1*a": e1 * a, "E2*a": e2 * a, "E3*a": e3 * a},
        "coefficients": {
            key: {
                "derived": str(derived[key]),
                "derived_float": float(derived[key]),
                "published": str(published[key]) if key in published else None,
                "published_float": float(published[key]) if key in published else None,
            }
            for key in ("E1", "E2", "E3")
        },
        "square_quadrant_coefficient": str(derived["square_quadrant"]),
        "matches_published": {
            "E1": bool(sp.simplify(derived["E1"] - published["E1"]) == 0),
            "E2": bool(sp.simplify(derived["E2"] - published["E2"]) == 0),
            "E3": bool(sp.simplify(derived["E3"] - published["E3"]) == 0),
        },
    }
    return energy, report

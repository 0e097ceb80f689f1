"""Analytic vacuum energy density in the three-plane wedge.

Each non-identity symmetry element g contributes a factor

    T(g) = (tr g - 1)/|eta|^4 - 2 |(1 + g) eta|^2 / |eta|^6,
    eta  = (1 - g) x,

and the density is the determinant-signed sum

    T(x) = (1/12 pi^2) * sum_{g != e} det(g) T(g),

proper rotations adding, improper elements (inversion included)
subtracting.  `closed_form_factor` evaluates the same factors from the
per-conjugacy-family closed forms; the two paths must agree to rounding
and are tested against each other as well as against the
finite-difference kernel oracle in `green`.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, OnFixedLocusError
from .symmetry import GroupElement, full_group, canonicalize, in_open_domain

_PREFACTOR = 1.0 / (12.0 * np.pi**2)


def t_factor(g: GroupElement, x, eps_rel: float = 1e-12) -> float:
    """Generic per-element density factor; x away from g's fixed locus."""
    xa = np.asarray(x, dtype=float)
    eta = xa - g.as_array() @ xa
    n2 = float(eta @ eta)
    scale = float(xa @ xa)
    if n2 <= (eps_rel**2) * scale:
        raise OnFixedLocusError(f"point {x} lies on the fixed locus of {g!r}")
    plus = eta + g.as_array() @ eta
    return (g.trace - 1.0) / n2**2 - 2.0 * float(plus @ plus) / n2**3


def t_factor_shifted(g: GroupElement, x, shift, eps_rel: float = 1e-12) -> float:
    """Factor for the affine image x -> g x + shift (pyramid lattice)."""
    xa = np.asarray(x, dtype=float)
    eta = xa - g.as_array() @ xa - np.asarray(shift, dtype=float)
    n2 = float(eta @ eta)
    scale = max(float(xa @ xa), float(np.dot(shift, shift)))
    if n2 <= (eps_rel**2) * max(scale, 1e-300):
        raise OnFixedLocusError(f"point {x} coincides with affine image of {g!r}")
    plus = eta + g.as_array() @ eta
    return (g.trace - 1.0) / n2**2 - 2.0 * float(plus @ plus) / n2**3


def _threefold_axis(matrix: np.ndarray) -> np.ndarray:
    for signs in ((1, 1, 1), (1, -1, 1), (-1, 1, 1), (1, 1, -1)):
        s = np.array(signs, dtype=float)
        if np.array_equal(matrix @ s, s):
            return s
    raise InputError("no body-diagonal axis found")


def closed_form_factor(g: GroupElement, x) -> float:
    """Per-element factor from the explicit closed forms.

    The quarter-turn, half-turn, 3-fold, face-diagonal and inversion
    families each have a closed expression in the coordinates; the
    family is recognized from (det, trace, matrix shape) and the axis
    read off the matrix.  Identity has no factor.
    """
    xa = np.asarray(x, dtype=float)
    r2 = float(xa @ xa)
    m = g.as_array()
    d, t = g.det, g.trace
    if d == 1:
        if t == 3:
            raise InputError("identity carries no density factor")
        if t == 1:
            # quarter turn about coordinate axis j
            j = int(np.argmax(np.diag(m)))
            p = r2 - xa[j] ** 2
            return -1.0 / p**2
        if t == 0:
            s = _threefold_axis(m)
            q = 3.0 * r2 - float(s @ xa) ** 2
            return -3.0 / q**2
        # t == -1: half turn; diagonal matrix -> coordinate axis
        if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
            j = int(np.argmax(np.diag(m)))
            p = r2 - xa[j] ** 2
            return -1.0 / (8.0 * p**2)
        # face-diagonal axis e_i + sigma e_k; j is the flipped coordinate
        j = int(np.argmin(np.diag(m)))
        i, k = [c for c in range(3) if c != j]
        sigma = m[i, k]
        p = (xa[i] - sigma * xa[k]) ** 2 + 2.0 * xa[j] ** 2
        return -1.0 / (2.0 * p**2)
    # improper elements
    if t == -3:
        return -1.0 / (4.0 * r2**2)
    if t == 1:
        # plane reflections: tr - 1 = 0 and g^2 = 1 kill both terms
        return 0.0
    if t == -1:
        # inversion times quarter turn about coordinate axis j
        j = int(np.argmin(np.diag(m)))
        return -(3.0 * r2 - xa[j] ** 2) / (2.0 * (r2 + xa[j] ** 2) ** 3)
    # t == 0: inversion times 3-fold rotation
    s = _threefold_axis(-m)
    u = float(s @ xa) ** 2
    return -(7.0 * r2 - u) / (r2 + u) ** 3


def _guard_open_point(xa: np.ndarray, group, eps_rel: float) -> None:
    mats = group.matrices()
    etas = xa[None, :] - mats @ xa
    n = np.linalg.norm(etas, axis=1)
    n[0] = np.inf  # identity
    if float(np.min(n)) <= eps_rel * np.linalg.norm(xa):
        raise OnFixedLocusError(f"point {tuple(xa)} is on (or too near) a wall")


def energy_density(x, eps_rel: float = 1e-9) -> float:
    """Vacuum energy density T00 at x, in units length^-4.

    The input is first mapped to the fundamental domain (the density is
    invariant under the group, and canonical evaluation makes equality
    of equivalent points exact).  Points within ``eps_rel * |x|`` of any
    wall or image locus raise OnFixedLocusError rather than returning a
    huge number.
    """
    g48 = full_group()
    xc, _ = canonicalize(x, g48)
    xa = np.asarray(xc, dtype=float)
    _guard_open_point(xa, g48, eps_rel)
    mats = g48.matrices()
    dets = g48.dets()
    traces = np.einsum("kii->k", mats)
    etas = xa[None, :] - mats @ xa               # (48, 3)
    plus = etas + np.einsum("kij,kj->ki", mats, etas)
    n2 = np.einsum("ki,ki->k", etas, etas)
    p2 = np.einsum("ki,ki->k", plus, plus)
    n2[0] = 1.0  # identity excluded below; avoid 0/0
    terms = dets * ((traces - 1.0) / n2**2 - 2.0 * p2 / n2**3)
    terms[0] = 0.0
    return _PREFACTOR * float(np.sum(terms))


def closed_form_density(x, eps_rel: float = 1e-9) -> float:
    """Density assembled from the per-family closed forms.

    Same determinant-signed grouping as `energy_density`; agreement to
    rounding is a regression check on every closed form at once.
    """
    g48 = full_group()
    xc, _ = canonicalize(x, g48)
    xa = np.asarray(xc, dtype=float)
    _guard_open_point(xa, g48, eps_rel)
    total = 0.0
    for g in g48:
        if g.is_identity:
            continue
        total += g.det * closed_form_factor(g, xa)
    return _PREFACTOR * total


def grouped_density_variant(x, eps_rel: float = 1e-9) -> float:
    """Hand-grouped assembly that counts the body-diagonal 3-fold pair once.

    The determinant-signed group sum contains that conjugate pair twice
    (the two rotation senses give equal factors).  This variant keeps
    every other family at its group multiplicity but the (1,1,1)-axis
    pair at coefficient one; `grouping_report` quantifies the gap.
    """
    g48 = full_group()
    xc, _ = canonicalize(x, g48)
    xa = np.asarray(xc, dtype=float)
    _guard_open_point(xa, g48, eps_rel)
    body_plus = GroupElement(((0, 0, 1), (1, 0, 0), (0, 1, 0)))       # 3-fold about (1,1,1)
    body_minus = GroupElement(((0, 0, -1), (-1, 0, 0), (0, -1, 0)))   # its inversion partner
    correction = closed_form_factor(body_plus, xa) + closed_form_factor(body_minus, xa)
    return energy_density(x, eps_rel) - _PREFACTOR * correction


def grouping_report(x) -> dict:
    """Compare the group-sum density with the hand-grouped variant."""
    full = energy_density(x)
    variant = grouped_density_variant(x)
    return {
        "group_sum": full,
        "grouped_variant": variant,
        "abs_diff": abs(full - variant),
        "rel_diff": abs(full - variant) / abs(full),
    }


def wedge_reference(alpha: float, r: float) -> float:
    """Energy density between two plates meeting at opening angle alpha.

    r is the distance to the common edge.  Vanishes at alpha = pi (a
    single infinite plate seen from either side).
    """
    if alpha <= 0 or alpha > np.pi:
        raise InputError("opening angle must lie in (0, pi]")
    if r <= 0:
        raise InputError("edge distance must be positive")
    return -((np.pi / alpha) ** 4 - 1.0) / (1440.0 * np.pi**2 * r**4)

"""Eigenmodes of the pyramid 0 <= x2 <= x1 <= x3 <= a.

A mode is an antisymmetrized product of sines: the 3x3 determinant
det[sin(pi n_i x_j / a)] over the index triple.  It vanishes on all
four faces, is killed identically whenever two indices coincide or one
vanishes, and distinct strictly-ordered triples are orthogonal over the
pyramid.  The physical spectrum is therefore indexed by k > n > m > 0,
one representative per free orbit of the signed-permutation group
acting on the index lattice.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import InputError


class ModeIndex(NamedTuple):
    """Strictly ordered positive index triple m < n < k."""

    m: int
    n: int
    k: int

    @property
    def norm(self) -> float:
        return math.sqrt(self.m**2 + self.n**2 + self.k**2)

    def frequency(self, a: float) -> float:
        return math.pi * self.norm / a

    def validate(self) -> "ModeIndex":
        if not (self.k > self.n > self.m > 0):
            raise InputError(f"mode indices must satisfy k > n > m > 0, got {self}")
        return self


def enumerate_modes(k_max: int) -> list[ModeIndex]:
    """All modes with largest index <= k_max, by frequency then index."""
    if k_max < 3:
        raise InputError("k_max must be at least 3")
    modes = [ModeIndex(m, n, k)
             for k in range(3, k_max + 1)
             for n in range(2, k)
             for m in range(1, n)]
    modes.sort(key=lambda t: (t.m**2 + t.n**2 + t.k**2, t))
    return modes


def _sine_determinant(p: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """det[sin(p_i x_j)] for pts of shape (..., 3); vectorized."""
    s = np.sin(p[:, None] * pts[..., None, :])  # (..., i, j)
    return (s[..., 0, 0] * (s[..., 1, 1] * s[..., 2, 2] - s[..., 1, 2] * s[..., 2, 1])
            - s[..., 0, 1] * (s[..., 1, 0] * s[..., 2, 2] - s[..., 1, 2] * s[..., 2, 0])
            + s[..., 0, 2] * (s[..., 1, 0] * s[..., 2, 1] - s[..., 1, 1] * s[..., 2, 0]))


@lru_cache(maxsize=64)
def pyramid_quadrature(order: int, a: float = 1.0):
    """Tensorized Gauss-Legendre rule for the iterated pyramid integral.

    Integration runs x3 over [0, a], x1 over [0, x3], x2 over [0, x1];
    returns (points, weights) with points of shape (order^3, 3).  The
    weights sum to the volume a^3/6 exactly (the Jacobian u^2 v is a
    polynomial the rule integrates exactly).
    """
    if order < 2:
        raise InputError("quadrature order must be at least 2")
    t, w = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (t + 1.0)  # nodes on [0, 1]
    wu = 0.5 * w
    uu, vv, ww = np.meshgrid(u, u, u, indexing="ij")
    w3, w1, w2 = np.meshgrid(wu, wu, wu, indexing="ij")
    x3 = a * uu
    x1 = x3 * vv
    x2 = x1 * ww
    weights = (a * w3) * (x3 * w1) * (x1 * w2)
    pts = np.stack([x1.ravel(), x2.ravel(), x3.ravel()], axis=-1)
    return pts, weights.ravel()


@lru_cache(maxsize=4096)
def mode_normalization(mode: ModeIndex, a: float = 1.0, order: int = 24) -> float:
    """Positive constant making the squared integral over the pyramid 1.

    Computed by quadrature once per (mode, a, order) and cached; safe
    for concurrent reads (worst case a duplicate computation).
    """
    mode = ModeIndex(*mode).validate()
    pts, wts = pyramid_quadrature(order, a)
    p = np.pi * np.array(mode, dtype=float) / a
    raw = _sine_determinant(p, pts)
    norm2 = float(wts @ raw**2)
    return 1.0 / math.sqrt(norm2)


def wavefunction(mode: ModeIndex, x, a: float = 1.0, order: int = 24):
    """Mode value at x (or an array of points of shape (..., 3)).

    Real convention: the sine determinant times a positive constant
    fixed by unit norm over the pyramid.  Evaluation outside the
    pyramid is allowed (used by the tiling tests); triples with a
    repeated or zero index give the zero function.
    """
    xa = np.asarray(x, dtype=float)
    m, n, k = mode
    if min(m, n, k) <= 0 or len({m, n, k}) < 3:
        return np.zeros(xa.shape[:-1]) if xa.ndim > 1 else 0.0
    p = np.pi * np.array([m, n, k], dtype=float) / a
    val = mode_normalization(ModeIndex(m, n, k), a, order) * _sine_determinant(p, xa)
    return val if xa.ndim > 1 else float(val)


def _kronecker_unit(npts: int, dim: int, seed_shift: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy points in the unit cube."""
    # golden-ratio style additive sequence; good enough for face sampling
    alphas = {1: [0.6180339887498949],
              2: [0.7548776662466927, 0.5698402909980532]}[dim]
    idx = np.arange(1 + seed_shift, npts + 1 + seed_shift)[:, None]
    return np.mod(idx * np.asarray(alphas)[None, :], 1.0)


def boundary_residual(mode: ModeIndex, a: float = 1.0, samples: int = 200) -> float:
    """Max |mode| over quasi-random points on the four faces."""
    if samples < 1:
        raise InputError("need at least one sample per face")
    mode = ModeIndex(*mode).validate()
    uv = _kronecker_unit(samples, 2)
    u, v = uv[:, 0], uv[:, 1]
    faces = []
    # x2 = 0 wall: 0 <= x1 <= x3 <= a
    x3 = a * v
    faces.append(np.stack([x3 * u, np.zeros(samples), x3], axis=-1))
    # x1 = x2 wall: 0 <= x2 = x1 <= x3 <= a
    faces.append(np.stack([x3 * u, x3 * u, x3], axis=-1))
    # x1 = x3 wall: 0 <= x2 <= x1 = x3 <= a
    x1 = a * v
    faces.append(np.stack([x1, x1 * u, x1], axis=-1))
    # x3 = a lid: 0 <= x2 <= x1 <= a
    faces.append(np.stack([a * v, a * v * u, np.full(samples, a)], axis=-1))
    worst = 0.0
    for pts in faces:
        worst = max(worst, float(np.max(np.abs(wavefunction(mode, pts, a)))))
    return worst


def interior_peak(mode: ModeIndex, a: float = 1.0, samples: int = 400) -> float:
    """Max |mode| over quasi-random interior points (comparison scale)."""
    uv = _kronecker_unit(samples, 2)
    w = np.mod(np.arange(1, samples + 1) * 0.33751058491861045, 1.0)
    x3 = a * uv[:, 0]
    x1 = x3 * uv[:, 1]
    x2 = x1 * w
    pts = np.stack([x1, x2, x3], axis=-1)
    return float(np.max(np.abs(wavefunction(mode, pts, a))))


def mode_overlap(m1: ModeIndex, m2: ModeIndex, a: float = 1.0,
                 order: int | None = None) -> float:
    """Integral of the product of two normalized modes over the pyramid.

    Approaches the Kronecker delta with increasing quadrature order; a
    warning is emitted when the order is below twice the largest index
    (the bandwidth heuristic).
    """
    m1 = ModeIndex(*m1).validate()
    m2 = ModeIndex(*m2).validate()
    kmax = max(m1.k, m2.k)
    if order is None:
        order = max(30, 2 * kmax + 8)
    if order < 2 * kmax:
        warnings.warn(f"quadrature order {order} below bandwidth 2*{kmax}; "
                      "overlap may be inaccurate", stacklevel=2)
    pts, wts = pyramid_quadrature(order, a)
    f1 = wavefunction(m1, pts, a, order=order)
    f2 = wavefunction(m2, pts, a, order=order)
    return float(wts @ (f1 * f2))


def mode_sum_identity(N: float) -> tuple[float, float]:
    """Finite cross-check of the quotient construction.

    Left side: sum of |n| over strictly ordered triples with norm <= N.
    Right side: 1/48 of the sum over all integer vectors with distinct
    nonzero coordinate magnitudes and norm <= N.  Exactly equal: each
    free orbit of the 48-element group has exactly one ordered
    representative.
    """
    if N < 2:
        raise InputError("cutoff too small to contain any mode")
    top = int(math.floor(N))
    rng = np.arange(-top, top + 1)
    g = np.array(np.meshgrid(rng, rng, rng, indexing="ij")).reshape(3, -1).T
    q = np.einsum("ni,ni->n", g, g)
    inside = (q > 0) & (q <= N * N + 1e-9)
    ag = np.abs(g)
    distinct = ((ag[:, 0] != ag[:, 1]) & (ag[:, 1] != ag[:, 2])
                & (ag[:, 0] != ag[:, 2]) & np.all(ag > 0, axis=1))
    rhs = float(np.sum(np.sqrt(q[inside & distinct]))) / 48.0
    ordered = inside & distinct & (g[:, 0] > 0) & (g[:, 1] > 0) & (g[:, 2] > 0) \
        & (g[:, 2] > g[:, 1]) & (g[:, 1] > g[:, 0])
    lhs = float(np.sum(np.sqrt(q[ordered])))
    return lhs, rhs

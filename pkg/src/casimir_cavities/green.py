"""Image-sum Green functions and the finite-difference stress oracle.

The wedge kernel is the determinant-signed sum of free massless Green
functions over the 48 point-group images of the source; the pyramid
kernel extends the sum over the translation lattice (2a Z)^3, truncated
at a spherical radius.  Both vanish on the cavity walls.

`stress_energy_numeric` applies the conformal coincidence-limit
operator to the renormalized kernel with central finite differences in
all eight spacetime coordinates and Richardson extrapolation.  It is
the independent check of the analytic density module: the two share no
formulas beyond the kernel itself.

All functions are pure and sum images in a fixed order, so results are
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, SingularConfigurationError, SingularPointError
from .symmetry import full_group

_FOUR_PI_SQ = 4.0 * np.pi**2


@dataclass(frozen=True)
class SpacetimePoint:
    """Time component plus spatial 3-vector, natural units (c = 1)."""

    t: float
    x: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "t", float(self.t))

    def spatial(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)


@dataclass(frozen=True)
class KernelSpec:
    """Which image kernel to differentiate, and how it is renormalized."""

    geometry: str  # "wedge" | "pyramid"
    a: float | None = None
    translation_radius: float | None = None
    renormalized: bool = True

    def __post_init__(self):
        if self.geometry not in ("wedge", "pyramid"):
            raise InputError(f"unknown geometry {self.geometry!r}")
        if self.geometry == "pyramid":
            if self.a is None or self.a <= 0:
                raise InputError("pyramid requires side a > 0")
            if self.translation_radius is None or self.translation_radius < 2 * self.a:
                raise InputError("pyramid translation radius must be >= 2a")


def minkowski_green(x: SpacetimePoint, y: SpacetimePoint) -> float:
    """Free massless propagator 1 / (4 pi^2 interval^2)."""
    dx = x.spatial() - y.spatial()
    dt = x.t - y.t
    s2 = float(dx @ dx) - dt * dt
    scale = float(dx @ dx) + dt * dt
    if abs(s2) <= 1e-14 * max(scale, 1e-300):
        raise SingularPointError("null or coincident spacetime separation")
    return 1.0 / (_FOUR_PI_SQ * s2)


@lru_cache(maxsize=None)
def _group_arrays():
    g48 = full_group()
    return g48.matrices(), g48.dets()


@lru_cache(maxsize=32)
def _shift_table(a: float, radius: float):
    """Lattice shifts |shift| <= radius, lexicographic in (n, m, k).

    Returns (shifts, index of the zero shift).
    """
    nmax = int(np.floor(radius / (2.0 * a)))
    rng = np.arange(-nmax, nmax + 1)
    grid = np.array(np.meshgrid(rng, rng, rng, indexing="ij")).reshape(3, -1).T
    shifts = 2.0 * a * grid.astype(float)
    keep = np.linalg.norm(shifts, axis=1) <= radius + 1e-12 * a
    shifts = shifts[keep]
    zero = int(np.where(~np.any(shifts != 0.0, axis=1))[0][0])
    return shifts, zero


def _signed_image_sum(xs, txy, y, shifts, drop_identity_zero, zero_idx):
    """Fixed-order det-signed sum of image propagators.

    xs, y: spatial 3-vectors; txy: time difference t_x - t_y;
    shifts: (S, 3) lattice translations.
    """
    mats, dets = _group_arrays()
    imgs = mats @ xs                                   # (48, 3)
    pts = shifts[:, None, :] + imgs[None, :, :]        # (S, 48, 3)
    diff = pts - y[None, None, :]
    d2 = np.einsum("sgi,sgi->sg", diff, diff) - txy * txy
    include = np.ones_like(d2, dtype=bool)
    if drop_identity_zero:
        include[zero_idx, 0] = False
    scale = float(xs @ xs + y @ y) + txy * txy + 1.0e-300
    if np.min(np.abs(d2[include])) <= 1e-14 * scale:
        raise SingularConfigurationError(
            "an included image point is null-separated from the source")
    d2_safe = np.where(include, d2, 1.0)
    terms = np.where(include, dets[None, :] / (_FOUR_PI_SQ * d2_safe), 0.0)
    return float(np.sum(terms))


_WEDGE_ZERO_SHIFT = np.zeros((1, 3))


def wedge_kernel(x: SpacetimePoint, y: SpacetimePoint,
                 renormalized: bool = False) -> float:
    """Three-plane wedge kernel: 48 point-group images, det-signed.

    With ``renormalized`` the direct (identity-image) propagator is
    dropped, which subtracts the free vacuum and leaves a kernel finite
    at coincidence for interior points.
    """
    return _signed_image_sum(x.spatial(), x.t - y.t, y.spatial(),
                             _WEDGE_ZERO_SHIFT, renormalized, 0)


def pyramid_kernel(x: SpacetimePoint, y: SpacetimePoint, a: float,
                   radius: float, renormalized: bool = False) -> float:
    """Pyramid kernel: point-group images plus lattice translations.

    Image set: g x + shift for all 48 g and shifts in (2a Z)^3 with
    |shift| <= radius; each term signed by det(g).  radius >= 2a so the
    nearest translates (which enforce the x3 = a wall) are present.
    """
    if a <= 0:
        raise InputError("pyramid side a must be positive")
    if radius < 2 * a:
        raise InputError("translation radius must be >= 2a")
    shifts, zero = _shift_table(float(a), float(radius))
    return _signed_image_sum(x.spatial(), x.t - y.t, y.spatial(),
                             shifts, renormalized, zero)


def _kernel_callable(spec: KernelSpec):
    if spec.geometry == "wedge":
        shifts, zero = _WEDGE_ZERO_SHIFT, 0
    else:
        shifts, zero = _shift_table(float(spec.a), float(spec.translation_radius))

    def f(tx, xs, ty, ys):
        return _signed_image_sum(xs, tx - ty, ys, shifts, spec.renormalized, zero)

    return f


def _nearest_image_distance(x: np.ndarray, spec: KernelSpec) -> float:
    mats, _ = _group_arrays()
    if spec.geometry == "wedge":
        shifts = _WEDGE_ZERO_SHIFT
    else:
        shifts, _ = _shift_table(float(spec.a), float(spec.translation_radius))
    imgs = shifts[:, None, :] + mats @ x
    d = np.linalg.norm(imgs - x[None, None, :], axis=2)
    d[np.abs(d) < 1e-300] = np.inf  # the identity / zero-shift image
    return float(np.min(d))


def stress_energy_numeric(spec: KernelSpec, x, h: float | None = None) -> float:
    """T00 via central differences of the renormalized kernel.

    The coincidence-limit operator (coefficients 2/3, -1/6, -1/6 eta,
    1/24 eta on the mixed and unmixed second derivatives) is applied
    literally in all eight coordinates at equal times, then Richardson
    extrapolation combines step sizes h and h/2.  Default h is 1e-3
    times the distance to the nearest image plane.
    """
    if not spec.renormalized:
        raise InputError("stress tensor needs the renormalized kernel")
    xa = np.asarray(x, dtype=float)
    f = _kernel_callable(spec)
    if h is None:
        h = 1e-3 * 0.5 * _nearest_image_distance(xa, spec)
    if h <= 0:
        raise SingularConfigurationError("point is on an image plane")

    def evaluate(offsets):
        # offsets: length-8 array over (tx, x1, x2, x3, ty, y1, y2, y3)
        tx = offsets[0]
        ty = offsets[4]
        return f(tx, xa + offsets[1:4], ty, xa + offsets[5:8])

    def t00(step):
        e = np.eye(8)
        f0 = evaluate(np.zeros(8))
        pure = np.empty(8)
        for c in range(8):
            fp = evaluate(step * e[c])
            fm = evaluate(-step * e[c])
            pure[c] = (fp - 2.0 * f0 + fm) / step**2
        mixed = {}
        for cx, cy in ((0, 4), (1, 5), (2, 6), (3, 7)):
            fpp = evaluate(step * (e[cx] + e[cy]))
            fpm = evaluate(step * (e[cx] - e[cy]))
            fmp = evaluate(step * (e[cy] - e[cx]))
            fmm = evaluate(-step * (e[cx] + e[cy]))
            mixed[(cx, cy)] = (fpp - fpm - fmp + fmm) / (4.0 * step**2)
        a_tt = mixed[(0, 4)]
        d_sp = mixed[(1, 5)] + mixed[(2, 6)] + mixed[(3, 7)]
        box_x = -pure[0] + pure[1] + pure[2] + pure[3]
        box_y = -pure[4] + pure[5] + pure[6] + pure[7]
        val = (2.0 / 3.0) * a_tt \
            - (1.0 / 6.0) * (pure[0] + pure[4]) \
            + (1.0 / 6.0) * (-a_tt + d_sp) \
            - (1.0 / 24.0) * (box_x + box_y)
        if not np.isfinite(val):
            raise SingularConfigurationError("non-finite stencil value")
        return val

    coarse = t00(h)
    fine = t00(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def pyramid_image_density(x, a: float, radius: float) -> float:
    """Analytic pyramid density from the affine image sum.

    Same per-image factors as the wedge density, with the translation
    shift folded into eta; prefactor 1/(12 pi^2) per signed image.
    """
    if a <= 0 or radius < 2 * a:
        raise InputError("need a > 0 and radius >= 2a")
    xa = np.asarray(x, dtype=float)
    mats, dets = _group_arrays()
    shifts, zero = _shift_table(float(a), float(radius))
    traces = np.einsum("kii->k", mats)
    etas = xa[None, None, :] - (mats @ xa)[None, :, :] - shifts[:, None, :]
    plus = etas + np.einsum("kij,skj->ski", mats, etas)
    n2 = np.einsum("ski,ski->sk", etas, etas)
    p2 = np.einsum("ski,ski->sk", plus, plus)
    n2[zero, 0] = 1.0
    terms = dets[None, :] * ((traces[None, :] - 1.0) / n2**2 - 2.0 * p2 / n2**3)
    terms[zero, 0] = 0.0
    return float(np.sum(terms)) / (12.0 * np.pi**2)


def pyramid_prefactor_report(x, a: float, radius: float) -> dict:
    """Which overall prefactor the kernel numerics support.

    Compares the finite-difference T00 of the pyramid kernel against
    the bare signed image sum of density factors; their ratio is the
    empirical prefactor, reported next to 1/(12 pi^2) and 1/(6 pi^2).
    """
    spec = KernelSpec("pyramid", a=a, translation_radius=radius)
    numeric = stress_energy_numeric(spec, x)
    bare = pyramid_image_density(x, a, radius) * (12.0 * np.pi**2)
    implied = numeric / bare
    return {
        "numeric_t00": numeric,
        "bare_image_sum": bare,
        "implied_prefactor": implied,
        "one_over_12pi2": 1.0 / (12.0 * np.pi**2),
        "one_over_6pi2": 1.0 / (6.0 * np.pi**2),
        "ratio_to_12pi2": implied * 12.0 * np.pi**2,
        "ratio_to_6pi2": implied * 6.0 * np.pi**2,
    }

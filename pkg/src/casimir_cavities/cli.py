"""Command-line interface.

Subcommands: group, density, energy, wedge-check, modes, zeta.  Exit
codes: 0 success, 1 usage or configuration error, 2 numerical failure.
Output files are byte-identical across repeated runs of the same
configuration (fixed summation order, fixed row order, fixed float
formatting).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import density as dens
from . import green, modes, symmetry, zeta
from .errors import CavityError, InputError, OnFixedLocusError

HBAR_C_EV_NM = 197.3269804
# commonly quoted rounded conversion 1 eV ~ 0.5e5 / cm
ROUNDED_EV_PER_INV_CM = 0.5e5
SPHERE_REFERENCE = 0.045  # literature vacuum energy of the spherical cavity, E*a


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(v: float) -> str:
    return f"{v:.16e}"


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_triple(text: str, cast=int):
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError(f"expected three comma-separated values, got {text!r}")
    return tuple(cast(p) for p in parts)


def _parse_bounds(text: str):
    axes = text.split(",")
    if len(axes) != 3:
        raise _UsageError("bounds need three axis ranges, e.g. 0.2:0.4,0.05:0.1,0.5:1.0")
    out = []
    for ax in axes:
        lo, _, hi = ax.partition(":")
        out.append((float(lo), float(hi)))
    return out


def cmd_group(args) -> int:
    gens = symmetry.wedge_reflections()
    g = symmetry.generate_group(gens)
    table = symmetry.octahedral_table()
    proper = set(e.matrix for e in g.proper_elements())
    lines = [
        f"order={g.order}",
        f"closure={'OK' if g.is_closed() else 'FAIL'}",
        f"proper={len(proper)}",
        f"proper_matches_table={'OK' if proper == set(e.matrix for e in table) else 'FAIL'}",
        f"tetrahedral_order={symmetry.tetrahedral_subgroup().order}",
        f"coordinate_reflection_order={symmetry.generate_group(symmetry.coordinate_reflections()).order}",
    ]
    if args.subgroup:
        sub = {
            "octahedral": symmetry.octahedral_table(),
            "tetrahedral": symmetry.tetrahedral_subgroup(),
            "coordinate": symmetry.generate_group(symmetry.coordinate_reflections()),
        }[args.subgroup]
        lines.append(f"subgroup={args.subgroup} order={sub.order}")
        for e in sub:
            lines.append(f"  {e.label or '?'}: {e.matrix} det={e.det} trace={e.trace}")
    if args.verify_table:
        ok = 0
        for i, e in enumerate(table):
            axis, frac = symmetry.OCTAHEDRAL_AXES[i]
            angle_ok = abs(e.trace - (1 + 2 * math.cos(2 * math.pi * float(frac)))) < 1e-9
            axis_ok = i == 0 or e.apply(axis) == axis
            good = e.det == 1 and angle_ok and axis_ok
            ok += good
            lines.append(f"  g{i}: {'OK' if good else 'FAIL'}")
        lines.append(f"table_verified={ok}/{table.order}")
    _emit("\n".join(lines) + "\n", args.output)
    all_ok = g.order == 48 and proper == set(e.matrix for e in table) and g.is_closed()
    return 0 if all_ok else 2


def _density_rows(points, with_oracle):
    spec = green.KernelSpec("wedge", renormalized=True)
    rows = []
    n_fail = 0
    for pt in points:
        row = {"x1": pt[0], "x2": pt[1], "x3": pt[2]}
        try:
            row["T"] = dens.energy_density(pt)
            row["status"] = "ok"
            if with_oracle:
                row["T_oracle"] = green.stress_energy_numeric(spec, pt)
                row["rel_diff"] = abs(row["T_oracle"] - row["T"]) / abs(row["T"])
        except OnFixedLocusError:
            row["T"] = math.nan
            row["status"] = "on-boundary"
            n_fail += 1
        rows.append(row)
    return rows, n_fail


def cmd_density(args) -> int:
    scale = args.scale
    if args.point:
        pts = [tuple(scale * v for v in _parse_triple(args.point, float))]
    else:
        counts = _parse_triple(args.grid, int)
        if any(c < 1 for c in counts):
            raise _UsageError("grid counts must be >= 1")
        bounds = _parse_bounds(args.bounds)
        axes = [np.linspace(lo, hi, c) for (lo, hi), c in zip(bounds, counts)]
        pts = [(scale * a1, scale * a2, scale * a3)
               for a1 in axes[0] for a2 in axes[1] for a3 in axes[2]]
    rows, n_fail = _density_rows(pts, args.oracle)
    cols = ["x1", "x2", "x3", "T"]
    if args.oracle:
        cols += ["T_oracle", "rel_diff"]
    cols.append("status")
    if args.format == "csv":
        out = [",".join(cols)]
        for r in rows:
            cells = []
            for c in cols:
                v = r.get(c, math.nan)
                cells.append(v if isinstance(v, str) else _fmt(v))
            out.append(",".join(cells))
        _emit("\n".join(out) + "\n", args.output)
    else:
        records = [{c: r.get(c, None) for c in cols} for r in rows]
        _emit(json.dumps(records, sort_keys=True, indent=1) + "\n", args.output)
    if n_fail == len(rows):
        return 2
    return 0


def cmd_energy(args) -> int:
    a = args.a
    if a <= 0:
        raise _UsageError("cavity size a must be positive")
    e_oracle, report = zeta.pyramid_energy_oracle(a)
    e1, e2, e3 = zeta.component_energies(a)
    e_pub = zeta.pyramid_energy_published(a)
    out = {
        "a": a,
        "E1*a": e1 * a,
        "E2*a": e2 * a,
        "E3*a": e3 * a,
        "E3_exact": "-pi/24",
        "E_published*a": e_pub * a,
        "E_oracle*a": e_oracle * a,
        "coefficients": report["coefficients"],
        "square_quadrant_coefficient": report["square_quadrant_coefficient"],
        "matches_published": report["matches_published"],
        "sphere_reference*a": SPHERE_REFERENCE,
    }
    if args.units == "ev":
        ea = e_pub * a
        out["length_nm"] = args.length_nm
        out["E_published_eV"] = ea * HBAR_C_EV_NM / args.length_nm
        out["E_published_eV_rounded_conversion"] = \
            ea / (args.length_nm * 1e-7 * ROUNDED_EV_PER_INV_CM)
        out["conversion_note"] = (
            f"precise hbar*c = {HBAR_C_EV_NM} eV nm; the rounded variant uses "
            "1 eV ~ 0.5e5 / cm")
    _emit(json.dumps(out, sort_keys=True, indent=1) + "\n", args.output)
    return 0


def cmd_wedge_check(args) -> int:
    rho, z, theta = args.rho, args.z, args.theta
    if rho <= 0 or z <= 0:
        raise _UsageError("rho and z must be positive")
    if not 0 < theta < math.pi / 4:
        raise _UsageError("theta must lie strictly inside (0, pi/4)")
    warn = ""
    if z / rho < 10:
        warn = "warning: pre-asymptotic geometry (z/rho < 10)\n"
    x = (rho * math.cos(theta), rho * math.sin(theta), z)
    val = dens.energy_density(x)
    ref = dens.wedge_reference(math.pi / 4, rho)
    ratio = val / ref
    ok = abs(ratio - 1.0) < args.tol
    text = (warn
            + f"density={_fmt(val)}\nreference={_fmt(ref)}\nratio={_fmt(ratio)}\n"
            + f"deviation={_fmt(abs(ratio - 1.0))}\n"
            + f"pass={'yes' if ok else 'no'} (tolerance {args.tol}; deviation "
            + "scales like (rho/z)^4)\n")
    _emit(text, args.output)
    return 0 if ok else 2


def cmd_modes(args) -> int:
    mode_list = modes.enumerate_modes(args.kmax)
    lines = [f"modes with k <= {args.kmax}: {len(mode_list)}"]
    shells: dict[int, int] = {}
    for m in mode_list:
        shells[m.k] = shells.get(m.k, 0) + 1
    lines.append("shell degeneracies: "
                 + ", ".join(f"k={k}: {v}" for k, v in sorted(shells.items())))
    for m in mode_list:
        lines.append(f"  ({m.m},{m.n},{m.k})  |n|={_fmt(m.norm)}  "
                     f"omega*a/pi={_fmt(m.norm)}")
    if args.check_overlap:
        lines.append("overlap matrix:")
        header = "mode," + ",".join(f"({m.m};{m.n};{m.k})" for m in mode_list)
        lines.append(header)
        for mi in mode_list:
            row = [f"({mi.m};{mi.n};{mi.k})"]
            for mj in mode_list:
                row.append(_fmt(modes.mode_overlap(mi, mj, args.a)))
            lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_zeta(args) -> int:
    coeffs = [float(c) for c in args.form.split(",")]
    q = zeta.QuadraticForm.diagonal(coeffs)
    val = zeta.epstein_zeta(q, args.s, lam=args.lam, method=args.method)
    out = {
        "form": coeffs,
        "s": args.s,
        "lambda": args.lam,
        "value": val.value,
        "method": val.method,
        "est_error": val.est_error,
    }
    _emit(json.dumps(out, sort_keys=True, indent=1) + "\n", args.output)
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="casimir-cavities",
                description="Vacuum energy in reflection-generated cavities")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="verify the symmetry group tables")
    g.add_argument("--subgroup", choices=["octahedral", "tetrahedral", "coordinate"])
    g.add_argument("--verify-table", action="store_true",
                   help="per-index axis/angle verification of the rotation table")
    g.add_argument("--output")
    g.set_defaults(func=cmd_group)

    d = sub.add_parser("density", help="wedge energy density samples")
    d.add_argument("--point", help="single point x1,x2,x3")
    d.add_argument("--grid", default="3,3,3", help="counts nx,ny,nz")
    d.add_argument("--bounds", default="0.2:0.4,0.05:0.15,0.5:1.0",
                   help="x1min:x1max,x2min:x2max,x3min:x3max")
    d.add_argument("--scale", type=float, default=1.0)
    d.add_argument("--oracle", action="store_true",
                   help="add finite-difference kernel column")
    d.add_argument("--format", choices=["csv", "json"], default="csv")
    d.add_argument("--output")
    d.set_defaults(func=cmd_density)

    e = sub.add_parser("energy", help="pyramid vacuum energy report")
    e.add_argument("--a", type=float, default=1.0)
    e.add_argument("--units", choices=["natural", "ev"], default="natural")
    e.add_argument("--length-nm", type=float, default=1.0)
    e.add_argument("--output")
    e.set_defaults(func=cmd_energy)

    w = sub.add_parser("wedge-check", help="edge-asymptotics consistency check")
    w.add_argument("--rho", type=float, required=True)
    w.add_argument("--z", type=float, required=True)
    w.add_argument("--theta", type=float, default=math.pi / 8)
    w.add_argument("--tol", type=float, default=0.02)
    w.add_argument("--output")
    w.set_defaults(func=cmd_wedge_check)

    m = sub.add_parser("modes", help="pyramid eigenmode listing")
    m.add_argument("--kmax", type=int, default=5)
    m.add_argument("--a", type=float, default=1.0)
    m.add_argument("--check-overlap", action="store_true")
    m.add_argument("--output")
    m.set_defaults(func=cmd_modes)

    z = sub.add_parser("zeta", help="Epstein zeta evaluation")
    z.add_argument("--form", required=True, help="diagonal coefficients c1,c2[,c3]")
    z.add_argument("--s", type=float, required=True)
    z.add_argument("--lam", type=float, default=1.0)
    z.add_argument("--method", choices=["ewald", "functional", "direct"],
                   default="ewald")
    z.add_argument("--output")
    z.set_defaults(func=cmd_zeta)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CavityError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

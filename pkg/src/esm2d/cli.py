"""Command-line interface.

Subcommands::

    forward       synthesize far-field data for a test scatterer
    invert        single-level reconstruction on a sampling grid
    multilevel    radius-calibrating reconstruction
    kernel-check  singular values of the disc kernel vs. the mode formula

Exit codes: 0 success, 2 validation error (bad flags or files), 3
numerical failure.  All file output is byte deterministic for identical
inputs.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import numpy as np

from .disc import DirectionGrid, DiscSpec, assemble_kernel
from .errors import NumericalError
from .fileio import read_farfield, write_farfield, write_indicator_grid
from .forward import ScattererSpec, synthesize_farfield
from .sampling import (
    EsmConfig,
    SamplingGrid,
    combine_indicators,
    indicator_field,
    run_multilevel,
)
from .tikhonov import RegConfig

__all__ = ["main", "cli_main"]


def _g(x: float) -> str:
    return format(float(x), "g")


def _parse_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"grid must be 'min:max:step', got {text!r}"
        )
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"grid must be numeric 'min:max:step', got {text!r}"
        ) from None
    if not (math.isfinite(lo) and math.isfinite(hi) and math.isfinite(step)):
        raise argparse.ArgumentTypeError("grid values must be finite")
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("grid needs min <= max and step > 0")
    return lo, hi, step


def _parse_arc(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"aperture must be 'lo:hi', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"aperture must be numeric 'lo:hi', got {text!r}"
        ) from None
    return lo, hi


def _parse_point(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"point must be 'x,y', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"point must be numeric, got {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esm2d",
        description="Extended sampling method for 2D acoustic inverse scattering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fwd = sub.add_parser("forward", help="synthesize far-field data")
    fwd.add_argument("--shape", required=True, choices=["disc", "triangle", "kite"])
    fwd.add_argument("--k", type=float, default=1.0, help="wavenumber")
    fwd.add_argument(
        "--dir", type=float, nargs="+", default=[0.0],
        help="incident direction angle(s), radians",
    )
    fwd.add_argument("--ndirs", type=int, default=52, help="observation directions")
    fwd.add_argument("--m", type=int, default=128, help="boundary quadrature size")
    fwd.add_argument("--noise", type=float, default=0.0, help="relative noise level")
    fwd.add_argument("--seed", type=int, default=None, help="noise seed")
    fwd.add_argument("--center", type=_parse_point, default=None,
                     help="shape center 'x,y'; canonical position when omitted")
    fwd.add_argument("--radius", type=float, default=1.0, help="disc radius")
    fwd.add_argument("--out", required=True, help="output data file")

    inv = sub.add_parser("invert", help="single-level reconstruction")
    inv.add_argument("--data", required=True, help="esm-ff data file")
    inv.add_argument("--R", type=float, default=1.0, help="sampling-disc radius")
    inv.add_argument("--alpha", type=float, default=1e-5)
    inv.add_argument("--morozov", nargs="?", type=float, const=-1.0, default=None,
                     metavar="DELTA_REL",
                     help="use the discrepancy rule; optional relative delta "
                          "(defaults to the data file's noise level)")
    inv.add_argument("--grid", type=_parse_grid, default=(-10.0, 10.0, 0.1),
                     help="'min:max:step' applied to both axes")
    inv.add_argument("--aperture", type=_parse_arc, default=None,
                     help="observation arc 'lo:hi' in radians")
    inv.add_argument("--kernel-dirs", type=int, default=None)
    inv.add_argument("--out", required=True, help="output directory")

    multi = sub.add_parser("multilevel", help="radius-calibrating reconstruction")
    multi.add_argument("--data", required=True)
    multi.add_argument("--R0", type=float, default=2.4, help="initial radius")
    multi.add_argument("--alpha", type=float, default=1e-5)
    multi.add_argument("--morozov", nargs="?", type=float, const=-1.0, default=None,
                       metavar="DELTA_REL")
    multi.add_argument("--grid", type=_parse_grid, default=(-10.0, 10.0, 0.1),
                       help="'min:max:step'; the step is superseded per level")
    multi.add_argument("--aperture", type=_parse_arc, default=None)
    multi.add_argument("--kernel-dirs", type=int, default=None)
    multi.add_argument("--out", required=True)

    chk = sub.add_parser("kernel-check", help="kernel singular values vs. modes")
    chk.add_argument("--k", type=float, default=1.0)
    chk.add_argument("--R", type=float, default=1.0)
    chk.add_argument("--ndirs", type=int, default=52)

    # let values like '-10:10:0.1' or '-3,-5' pass as arguments, not flags
    matcher = re.compile(r"^-\d[\d.:,eE+-]*$")
    for p in (parser, fwd, inv, multi, chk):
        p._negative_number_matcher = matcher
    return parser


def _reg_from_args(args, data) -> RegConfig:
    if args.morozov is not None:
        delta = args.morozov
        if delta == -1.0:
            if data.noise_level <= 0.0:
                raise ValueError(
                    "--morozov without a value needs a data file with a "
                    "recorded noise level"
                )
            delta = data.noise_level
        return RegConfig.morozov(delta, fallback_alpha=args.alpha)
    return RegConfig.fixed(args.alpha)


def _cmd_forward(args) -> int:
    if args.noise > 0.0 and args.seed is None:
        raise ValueError("--noise requires --seed for reproducible data")
    angles = sorted(float(a) % (2.0 * math.pi) for a in args.dir)
    incident = DirectionGrid(tuple(angles))
    obs = DirectionGrid.uniform(args.ndirs)
    if args.shape == "disc":
        spec = ScattererSpec(kind="disc", center=args.center, radius=args.radius)
    else:
        spec = ScattererSpec(kind=args.shape, center=args.center)
    data = synthesize_farfield(
        spec, args.k, incident, obs, m=args.m,
        noise_level=args.noise, seed=args.seed,
    )
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    write_farfield(out, data)
    print(f"wrote {out} shape={args.shape} k={_g(args.k)} "
          f"obs={args.ndirs} incident={len(incident)} noise={_g(args.noise)}")
    return 0


def _combined_field(cfg, data):
    fields = [
        indicator_field(cfg, data, incident_index=q)
        for q in range(len(data.incident))
    ]
    return fields[0] if len(fields) == 1 else combine_indicators(fields)


def _cmd_invert(args) -> int:
    data = read_farfield(args.data)
    lo, hi, step = args.grid
    cfg = EsmConfig(
        disc=DiscSpec(radius=args.R, wavenumber=data.k),
        grid=SamplingGrid(lo, hi, lo, hi, step),
        reg=_reg_from_args(args, data),
        aperture=args.aperture,
        kernel_dirs=args.kernel_dirs,
    )
    fld = _combined_field(cfg, data)
    z = fld.argmin_point
    summary = (
        f"zstar=({_g(z[0])},{_g(z[1])}) R={_g(args.R)} Imin={_g(fld.min_normalized)}"
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_indicator_grid(out / "indicator.txt", fld)
    (out / "reconstruction.txt").write_text(summary + "\n", encoding="ascii")
    print(summary)
    return 0


def _cmd_multilevel(args) -> int:
    data = read_farfield(args.data)
    lo, hi, step = args.grid
    cfg = EsmConfig(
        disc=DiscSpec(radius=args.R0, wavenumber=data.k),
        grid=SamplingGrid(lo, hi, lo, hi, step),
        reg=_reg_from_args(args, data),
        aperture=args.aperture,
        kernel_dirs=args.kernel_dirs,
    )
    rec = run_multilevel(args.R0, cfg, data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = []
    for j, lv in enumerate(rec.level_history):
        table.append(
            f"level={j} R={_g(lv.radius)} z=({_g(lv.center[0])},{_g(lv.center[1])}) "
            f"contained={'yes' if lv.contained else 'no'}"
        )
    if rec.cap_reached:
        table.append(f"level-cap-reached={len(rec.level_history) - 1}")
    summary = (
        f"zstar=({_g(rec.center[0])},{_g(rec.center[1])}) "
        f"R={_g(rec.radius)} Imin={_g(rec.indicator_min)}"
    )
    (out / "levels.txt").write_text("\n".join(table) + "\n", encoding="ascii")
    (out / "reconstruction.txt").write_text(summary + "\n", encoding="ascii")

    # indicator grid of the selected level, recomputed on its lattice
    sel = EsmConfig(
        disc=DiscSpec(radius=rec.radius, wavenumber=data.k),
        grid=SamplingGrid(lo, hi, lo, hi, rec.radius / 2.0),
        reg=cfg.reg,
        aperture=cfg.aperture,
        kernel_dirs=cfg.kernel_dirs,
    )
    write_indicator_grid(out / "indicator.txt", _combined_field(sel, data))

    for line in table:
        print(line)
    print(f"R={_g(rec.radius)}")
    return 0


def _cmd_kernel_check(args) -> int:
    disc = DiscSpec(radius=args.R, wavenumber=args.k)
    grid = DirectionGrid.uniform(args.ndirs)
    kernel = assemble_kernel(disc, (0.0, 0.0), grid, grid)
    weight = 2.0 * math.pi / args.ndirs
    sigma = np.sort(np.linalg.svd(weight * kernel.entries, compute_uv=False))[::-1]

    from .bessel import bessel_j_array, bessel_y_array
    from .disc import truncation_order

    order = truncation_order(disc)
    kr = disc.kr
    j = bessel_j_array(order, kr)
    y = bessel_y_array(order, kr)
    mag = 2.0 * math.pi * math.sqrt(2.0 / (math.pi * args.k)) * np.abs(
        j / np.hypot(j, y)
    )
    modes = [mag[0]] + [m for n in range(1, order + 1) for m in (mag[n], mag[n])]
    modes = np.sort(np.array(modes))[::-1][: args.ndirs]

    rows = min(20, args.ndirs)
    print(f"kernel-check k={_g(args.k)} R={_g(args.R)} ndirs={args.ndirs}")
    print("   i  sigma_scaled           mode_magnitude         abs_diff")
    worst = 0.0
    for i in range(rows):
        ref = modes[i] if i < len(modes) else 0.0
        diff = abs(sigma[i] - ref)
        worst = max(worst, diff)
        print(f"{i:4d}  {sigma[i]:<21.17g}  {ref:<21.17g}  {diff:.3e}")
    print(f"max_abs_diff={worst:.3e}")
    return 0


def cli_main(argv=None) -> int:
    """Run the CLI; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    handlers = {
        "forward": _cmd_forward,
        "invert": _cmd_invert,
        "multilevel": _cmd_multilevel,
        "kernel-check": _cmd_kernel_check,
    }
    try:
        return handlers[args.command](args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())

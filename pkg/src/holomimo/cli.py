"""Command-line front end.

Subcommands: ``corr2d``, ``corr3d``, ``ecc``, ``efficiency``, ``capacity``
and ``sweep``.  Exit code 0 on success, 1 with a message on stderr for any
validation or I/O failure.  The ``HOLOMIMO_WORKERS`` environment variable
sets the sweep worker count; output is identical for any value.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .aperture import efficiency_vector, hannan_efficiency
from .correlation import AngularSpread2D, PolarRange3D
from .pattern_io import load_pattern_file
from .patterns import AngularPowerSpectrum, ecc
from .scenarios import emit_correlation_curve, evaluate_count, parse_config, run_sweep
from .touchstone import load_touchstone


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holomimo",
        description="Spatial correlation, aperture limits and MIMO capacity sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corr2d", help="2-D angular-spread correlation curve as CSV")
    p.add_argument("--width-deg", type=float, default=180.0, help="angular spread width")
    p.add_argument("--center-deg", type=float, default=90.0, help="spread centre azimuth")
    p.add_argument("--d-max", type=float, default=3.0, help="largest separation, wavelengths")
    p.add_argument("--d-step", type=float, default=0.01, help="separation grid step")
    p.add_argument("--out", type=Path, required=True, help="output CSV path")

    p = sub.add_parser("corr3d", help="3-D polar-range correlation curve as CSV")
    p.add_argument("--theta-min-deg", type=float, default=0.0)
    p.add_argument("--theta-max-deg", type=float, default=180.0)
    p.add_argument("--d-max", type=float, default=3.0)
    p.add_argument("--d-step", type=float, default=0.01)
    p.add_argument("--out", type=Path, required=True, help="output CSV path")

    p = sub.add_parser("ecc", help="pattern-overlap correlation of two pattern files")
    p.add_argument("--pattern-a", type=Path, required=True)
    p.add_argument("--pattern-b", type=Path, required=True)
    p.add_argument("--xpd", type=float, default=1.0, help="cross-polarisation discrimination")

    p = sub.add_parser("efficiency", help="embedded efficiencies from S-parameters or cell size")
    p.add_argument("--touchstone", type=Path, help="Touchstone .sNp file")
    p.add_argument("--frequency-hz", type=float, help="frequency to pick from the file")
    p.add_argument("--dx", type=float, help="unit-cell width, wavelengths")
    p.add_argument("--dy", type=float, help="unit-cell height, wavelengths")
    p.add_argument("--cap", type=float, default=0.95, help="large-spacing efficiency cap")

    p = sub.add_parser("capacity", help="diversity and ergodic capacity for one element count")
    p.add_argument("--config", type=Path, required=True, help="scenario config file")
    p.add_argument("--n-x", type=int, help="element count (default: each count in the config)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--realizations", type=int, help="override the realization count")

    p = sub.add_parser("sweep", help="run the element-count sweep and write the CSV")
    p.add_argument("--config", type=Path, required=True, help="scenario config file")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", type=Path, help="override the config output path")

    return parser


def _d_grid(d_max: float, d_step: float) -> np.ndarray:
    if not (math.isfinite(d_max) and d_max >= 0):
        raise ValueError(f"--d-max must be >= 0, got {d_max!r}")
    if not (math.isfinite(d_step) and d_step > 0):
        raise ValueError(f"--d-step must be positive, got {d_step!r}")
    return np.arange(0.0, d_max + d_step / 2, d_step)


def _cmd_corr2d(args) -> int:
    spread = AngularSpread2D(
        center_azimuth=math.radians(args.center_deg), width=math.radians(args.width_deg)
    )
    rows = emit_correlation_curve("2d", _d_grid(args.d_max, args.d_step), args.out, spread=spread)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_corr3d(args) -> int:
    polar = PolarRange3D(math.radians(args.theta_min_deg), math.radians(args.theta_max_deg))
    rows = emit_correlation_curve(
        "3d", _d_grid(args.d_max, args.d_step), args.out, polar_range=polar
    )
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_ecc(args) -> int:
    pattern_a = load_pattern_file(args.pattern_a)
    pattern_b = load_pattern_file(args.pattern_b)
    spectrum = AngularPowerSpectrum(pattern_a.grid, xpd=args.xpd)
    rho = ecc(pattern_a, pattern_b, spectrum)
    print(f"rho = {rho.real:.9g} {rho.imag:+.9g}j")
    print(f"|rho| = {abs(rho):.9g}")
    print(f"|rho|^2 = {abs(rho) ** 2:.9g}")
    return 0


def _cmd_efficiency(args) -> int:
    if args.touchstone is not None:
        if args.frequency_hz is None:
            raise ValueError("--touchstone requires --frequency-hz")
        s = load_touchstone(args.touchstone, args.frequency_hz)
        eff = efficiency_vector(s)
        print(f"frequency_hz = {s.frequency_hz:.9g}")
        for n, e in enumerate(eff.values):
            print(f"e[{n}] = {e:.9g}")
        print(f"mean = {eff.mean():.9g}")
        return 0
    if args.dx is None or args.dy is None:
        raise ValueError("provide either --touchstone with --frequency-hz, or --dx and --dy")
    print(f"hannan_bound = {hannan_efficiency(args.dx, args.dy, args.cap):.9g}")
    return 0


def _cmd_capacity(args) -> int:
    config = parse_config(args.config)
    config = _apply_overrides(config, seed=args.seed, realizations=args.realizations)
    counts = [args.n_x] if args.n_x is not None else list(config.element_counts)
    for n in counts:
        row = evaluate_count(config, n)
        print(
            f"n_x={row.n_x} spacing={row.spacing:.9g} diversity={row.diversity:.9g} "
            f"mean_efficiency={row.mean_efficiency:.9g} "
            f"capacity={row.capacity_mean:.9g} stderr={row.capacity_stderr:.9g}"
        )
    return 0


def _cmd_sweep(args) -> int:
    config = parse_config(args.config)
    config = _apply_overrides(config, seed=args.seed)
    out = args.out if args.out is not None else config.output
    rows = run_sweep(config, out_path=out)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _apply_overrides(config, seed=None, realizations=None):
    from dataclasses import replace

    if seed is not None:
        config = replace(config, seed=seed)
    if realizations is not None:
        config = replace(config, realizations=realizations)
    return config


_COMMANDS = {
    "corr2d": _cmd_corr2d,
    "corr3d": _cmd_corr3d,
    "ecc": _cmd_ecc,
    "efficiency": _cmd_efficiency,
    "capacity": _cmd_capacity,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

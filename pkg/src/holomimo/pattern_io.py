"""Grid-CSV persistence for radiation patterns.

Format: a header line ``theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi``
followed by one row per direction in row-major theta-then-phi order.
Angles are in degrees, fields split into real/imaginary columns (matching
common far-field export conventions and avoiding phase-unwrap ambiguity).
``#`` comment lines are permitted anywhere; encoding is UTF-8.

Values are written with ``repr`` (shortest round-trip form), so a
save/load cycle reproduces the field samples bit-exactly.
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .patterns import AngularGrid, RadiationPattern

HEADER = "theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi"

_COLUMNS = HEADER.split(",")


class PatternFileError(ValueError):
    """Malformed pattern file; carries the offending 1-based line number."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


def save_pattern_file(pattern: RadiationPattern, path) -> None:
    """Write a pattern to grid-CSV; the write is atomic (temp file + rename)."""
    path = Path(path)
    theta_deg = np.degrees(pattern.grid.theta)
    phi_deg = np.degrees(pattern.grid.phi)
    lines = [HEADER]
    for i, td in enumerate(theta_deg):
        for j, pd in enumerate(phi_deg):
            et = pattern.e_theta[i, j]
            ep = pattern.e_phi[i, j]
            lines.append(
                f"{td!r},{pd!r},{et.real!r},{et.imag!r},{ep.real!r},{ep.imag!r}"
            )
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_pattern_file(path) -> RadiationPattern:
    """Read a grid-CSV pattern file, validating grid structure row by row."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw_lines = fh.readlines()

    header_seen = False
    rows: list[tuple[int, float, float, complex, complex]] = []
    for line_no, raw in enumerate(raw_lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            cols = [c.strip().lower() for c in line.split(",")]
            if cols != _COLUMNS:
                missing = [c for c in _COLUMNS if c not in cols]
                if missing:
                    raise PatternFileError(
                        path, line_no, f"header is missing columns {missing}"
                    )
                raise PatternFileError(
                    path, line_no, f"expected header {HEADER!r}, got {line!r}"
                )
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 6:
            raise PatternFileError(
                path, line_no, f"expected 6 columns, got {len(fields)}"
            )
        try:
            td, pd, re_t, im_t, re_p, im_p = (float(f) for f in fields)
        except ValueError:
            raise PatternFileError(path, line_no, f"non-numeric value in row {line!r}") from None
        if not all(map(math.isfinite, (td, pd, re_t, im_t, re_p, im_p))):
            raise PatternFileError(path, line_no, "non-finite value in row")
        if not (0.0 <= td <= 180.0):
            raise PatternFileError(path, line_no, f"theta_deg {td!r} outside [0, 180]")
        if not (0.0 <= pd < 360.0):
            raise PatternFileError(path, line_no, f"phi_deg {pd!r} outside [0, 360)")
        rows.append((line_no, td, pd, complex(re_t, im_t), complex(re_p, im_p)))

    if not header_seen:
        raise PatternFileError(path, None, "missing header line")
    if not rows:
        raise PatternFileError(path, None, "no data rows")

    # Phi samples are defined by the first theta block; every later block
    # must repeat them in order under a strictly increasing theta.
    phi_vals: list[float] = []
    first_theta = rows[0][1]
    for _, td, pd, _, _ in rows:
        if td != first_theta:
            break
        phi_vals.append(pd)
    n_phi = len(phi_vals)
    if len(rows) % n_phi != 0:
        raise PatternFileError(
            path, rows[-1][0], f"row count {len(rows)} is not a multiple of {n_phi} phi samples"
        )
    n_theta = len(rows) // n_phi

    theta_vals: list[float] = []
    theta_first_line: list[int] = []
    seen: set[tuple[float, float]] = set()
    e_theta = np.empty((n_theta, n_phi), dtype=complex)
    e_phi = np.empty((n_theta, n_phi), dtype=complex)
    for k, (line_no, td, pd, et, ep) in enumerate(rows):
        i, j = divmod(k, n_phi)
        if (td, pd) in seen:
            raise PatternFileError(
                path, line_no, f"duplicate direction row (theta={td!r}, phi={pd!r})"
            )
        seen.add((td, pd))
        if j == 0:
            if theta_vals and td <= theta_vals[-1]:
                raise PatternFileError(
                    path, line_no, f"theta_deg {td!r} breaks row-major theta order"
                )
            theta_vals.append(td)
            theta_first_line.append(line_no)
        elif td != theta_vals[-1]:
            raise PatternFileError(
                path, line_no, f"unexpected theta_deg {td!r} inside the {theta_vals[-1]!r} block"
            )
        if pd != phi_vals[j]:
            raise PatternFileError(
                path, line_no, f"expected phi_deg {phi_vals[j]!r} in row-major order, got {pd!r}"
            )
        e_theta[i, j] = et
        e_phi[i, j] = ep

    _check_uniform(path, "theta_deg", theta_vals, theta_first_line)
    phi_lines = [rows[j][0] for j in range(n_phi)]
    _check_uniform(path, "phi_deg", phi_vals, phi_lines)

    try:
        grid = AngularGrid(np.radians(theta_vals), np.radians(phi_vals))
        return RadiationPattern(grid, e_theta, e_phi)
    except ValueError as exc:
        raise PatternFileError(path, None, str(exc)) from exc


def _check_uniform(path, name: str, values: list[float], lines: list[int]) -> None:
    if len(values) < 2:
        raise PatternFileError(path, lines[0], f"need at least 2 distinct {name} values")
    step = values[1] - values[0]
    for k in range(1, len(values)):
        if abs((values[k] - values[k - 1]) - step) > 1e-9:
            raise PatternFileError(
                path,
                lines[k],
                f"non-uniform {name} spacing: {values[k] - values[k - 1]!r} vs {step!r}",
            )

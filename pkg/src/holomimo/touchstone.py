"""Touchstone v1 reader for N-port S-parameter files.

Supported subset: a single ``# <unit> S <RI|MA|DB> R <ref>`` option line,
``!`` comments, and row-wrapped N-port data blocks per frequency in
ascending frequency order.  The port count is taken from the ``.sNp``
file extension.  Two-port files use the legacy v1 column order
(S11, S21, S12, S22); every other port count is row-major.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from .aperture import ScatteringMatrix

_UNIT_SCALE = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_FORMATS = ("ri", "ma", "db")

_EXTENSION_RE = re.compile(r"\.s(\d+)p$", re.IGNORECASE)


class TouchstoneError(ValueError):
    """Malformed Touchstone file; carries the offending 1-based line number."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


def _to_complex(fmt: str, a: float, b: float) -> complex:
    if fmt == "ri":
        return complex(a, b)
    if fmt == "ma":
        return a * complex(math.cos(math.radians(b)), math.sin(math.radians(b)))
    # db: magnitude in dB20, angle in degrees
    mag = 10.0 ** (a / 20.0)
    return mag * complex(math.cos(math.radians(b)), math.sin(math.radians(b)))


def load_touchstone(path, target_frequency_hz: float) -> ScatteringMatrix:
    """S-matrix at the sampled frequency nearest ``target_frequency_hz``.

    On an exact tie between two sampled frequencies the lower one wins.
    """
    path = Path(path)
    target_frequency_hz = float(target_frequency_hz)
    if not (math.isfinite(target_frequency_hz) and target_frequency_hz > 0):
        raise ValueError(f"target frequency must be positive, got {target_frequency_hz!r}")
    m = _EXTENSION_RE.search(path.name)
    if m is None:
        raise TouchstoneError(path, None, "cannot infer port count: expected a .sNp extension")
    n_ports = int(m.group(1))
    if n_ports < 1:
        raise TouchstoneError(path, None, f"invalid port count {n_ports} in extension")

    unit_scale = None
    fmt = None
    values: list[float] = []
    value_lines: list[int] = []

    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("!", 1)[0].strip()
            if not line:
                continue
            if line.startswith("#"):
                if fmt is not None:
                    raise TouchstoneError(path, line_no, "multiple option lines")
                if values:
                    raise TouchstoneError(path, line_no, "option line must precede the data")
                unit_scale, fmt = _parse_option_line(path, line_no, line)
                continue
            if fmt is None:
                raise TouchstoneError(path, line_no, "data before the # option line")
            for token in line.split():
                try:
                    values.append(float(token))
                except ValueError:
                    raise TouchstoneError(
                        path, line_no, f"non-numeric data token {token!r}"
                    ) from None
                value_lines.append(line_no)

    if fmt is None:
        raise TouchstoneError(path, None, "missing # option line")
    if not values:
        raise TouchstoneError(path, None, "no frequency points")

    block = 1 + 2 * n_ports * n_ports
    if len(values) % block != 0:
        leftover = (len(values) // block) * block
        raise TouchstoneError(
            path,
            value_lines[leftover],
            f"data size inconsistent with {n_ports}-port blocks "
            f"({len(values)} values, expected a multiple of {block})",
        )

    frequencies: list[float] = []
    matrices: list[np.ndarray] = []
    for start in range(0, len(values), block):
        freq = values[start] * unit_scale
        if frequencies and freq <= frequencies[-1]:
            raise TouchstoneError(
                path,
                value_lines[start],
                f"frequencies must be strictly increasing (noise data is not supported); "
                f"got {freq!r} Hz after {frequencies[-1]!r} Hz",
            )
        pairs = values[start + 1 : start + block]
        entries = [
            _to_complex(fmt, pairs[2 * k], pairs[2 * k + 1])
            for k in range(n_ports * n_ports)
        ]
        s = np.empty((n_ports, n_ports), dtype=complex)
        if n_ports == 2:
            # Touchstone v1 legacy two-port order: S11 S21 S12 S22.
            s[0, 0], s[1, 0], s[0, 1], s[1, 1] = entries
        else:
            s[:] = np.asarray(entries).reshape(n_ports, n_ports)
        try:
            matrices.append(ScatteringMatrix(s, frequency_hz=freq).matrix)
        except ValueError as exc:
            raise TouchstoneError(path, value_lines[start], str(exc)) from exc
        frequencies.append(freq)

    best = 0
    for i, f in enumerate(frequencies):
        if abs(f - target_frequency_hz) < abs(frequencies[best] - target_frequency_hz):
            best = i
    return ScatteringMatrix(matrices[best], frequency_hz=frequencies[best])


def _parse_option_line(path, line_no: int, line: str) -> tuple[float, str]:
    tokens = line[1:].lower().split()
    # Fill in the spec defaults for omitted trailing options.
    defaults = ["ghz", "s", "ma", "r", "50"]
    tokens = tokens + defaults[len(tokens) :]
    unit, parameter, fmt = tokens[0], tokens[1], tokens[2]
    if unit not in _UNIT_SCALE:
        raise TouchstoneError(path, line_no, f"unknown frequency unit {unit!r}")
    if parameter != "s":
        raise TouchstoneError(path, line_no, f"only S-parameters are supported, got {parameter!r}")
    if fmt not in _FORMATS:
        raise TouchstoneError(path, line_no, f"unknown data format {fmt!r} (expected RI, MA or DB)")
    if tokens[3] != "r":
        raise TouchstoneError(path, line_no, f"expected 'R <ref>' in option line, got {tokens[3]!r}")
    try:
        float(tokens[4])
    except ValueError:
        raise TouchstoneError(
            path, line_no, f"non-numeric reference resistance {tokens[4]!r}"
        ) from None
    return _UNIT_SCALE[unit], fmt

"""Configuration-driven sweeps over element count at fixed aperture.

A scenario fixes the aperture, the correlation source (closed-form models,
synthesized patterns, or measured pattern files), the efficiency source
(unit, Hannan's limit, or a Touchstone file) and the Monte Carlo settings.
Sweeping the element count then traces how diversity, mean embedded
efficiency and ergodic capacity evolve as the aperture gets denser, and
emits the rows as a deterministic CSV.
"""

from __future__ import annotations

import configparser
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .aperture import (
    ArrayLayout,
    EfficiencyVector,
    efficiency_vector,
    hannan_efficiency,
    saturation_count_1d,
)
from .capacity import ChannelScenario, covariance, diversity, ergodic_capacity
from .correlation import AngularSpread2D, PolarRange3D, clarke2d, corr3d
from .pattern_io import load_pattern_file
from .patterns import (
    AngularGrid,
    CorrelationMatrix,
    RadiationPattern,
    correlation_matrix,
    isotropic_pattern,
    synthesize_isolated_pattern,
    translate_pattern,
)
from .touchstone import load_touchstone

SWEEP_CSV_HEADER = "n_x,spacing,diversity,mean_efficiency,capacity_mean,capacity_stderr"
CURVE_CSV_HEADER = "d,value"
WORKERS_ENV_VAR = "HOLOMIMO_WORKERS"

CORRELATION_SOURCES = (
    "analytic-2d",
    "analytic-3d",
    "synthesized-patterns",
    "pattern-files",
)
EFFICIENCY_SOURCES = ("unit", "hannan", "touchstone-file")
ELEMENT_MODELS = ("isotropic", "cos-q")

_MAX_SEED = 2**64


class ConfigError(ValueError):
    """Invalid scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated sweep description.

    Only the keys belonging to the selected correlation and efficiency
    sources may be set; everything else keeps its default.
    """

    aperture_lx: float
    element_counts: tuple[int, ...]
    correlation_source: str
    efficiency_source: str
    snr_db: float = 10.0
    realizations: int = 10_000
    seed: int = 0
    output: Path = Path("sweep.csv")
    # analytic-2d
    width_deg: float = 180.0
    center_deg: float = 90.0
    # analytic-3d
    theta_min_deg: float = 0.0
    theta_max_deg: float = 180.0
    # synthesized-patterns
    element_model: str = "isotropic"
    element_exponent: float = 0.75
    element_efficiency: float = 0.95
    grid_step_deg: float = 1.0
    # pattern-files
    pattern_files: tuple[Path, ...] = ()
    # hannan
    cell_dy: float = 1.0
    efficiency_cap: float = 0.95
    # touchstone-file
    touchstone_file: Path | None = None
    touchstone_frequency_hz: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.aperture_lx) and self.aperture_lx > 0):
            raise ConfigError(f"aperture_lx must be positive, got {self.aperture_lx!r}")
        counts = tuple(int(n) for n in self.element_counts)
        if not counts:
            raise ConfigError("element_counts must list at least one element count")
        if any(n < 1 for n in counts):
            raise ConfigError(f"element counts must be >= 1, got {counts}")
        object.__setattr__(self, "element_counts", counts)
        if self.correlation_source not in CORRELATION_SOURCES:
            raise ConfigError(
                f"unknown correlation source {self.correlation_source!r}; "
                f"expected one of {CORRELATION_SOURCES}"
            )
        if self.efficiency_source not in EFFICIENCY_SOURCES:
            raise ConfigError(
                f"unknown efficiency source {self.efficiency_source!r}; "
                f"expected one of {EFFICIENCY_SOURCES}"
            )
        if not math.isfinite(self.snr_db):
            raise ConfigError(f"snr_db must be finite, got {self.snr_db!r}")
        if int(self.realizations) < 1:
            raise ConfigError(f"realizations must be >= 1, got {self.realizations!r}")
        object.__setattr__(self, "realizations", int(self.realizations))
        if not (0 <= int(self.seed) < _MAX_SEED):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "output", Path(self.output))
        if not (0.0 < self.width_deg <= 180.0):
            raise ConfigError(f"width_deg must lie in (0, 180], got {self.width_deg!r}")
        if not (0.0 <= self.theta_min_deg < self.theta_max_deg <= 180.0):
            raise ConfigError(
                "theta range must satisfy 0 <= theta_min_deg < theta_max_deg <= 180, "
                f"got [{self.theta_min_deg!r}, {self.theta_max_deg!r}]"
            )
        if self.element_model not in ELEMENT_MODELS:
            raise ConfigError(
                f"unknown element model {self.element_model!r}; expected one of {ELEMENT_MODELS}"
            )
        if self.element_exponent < 0:
            raise ConfigError(f"element exponent must be >= 0, got {self.element_exponent!r}")
        if not (0.0 < self.element_efficiency <= 1.0):
            raise ConfigError(
                f"element_efficiency must lie in (0, 1], got {self.element_efficiency!r}"
            )
        if self.correlation_source == "pattern-files":
            files = tuple(Path(f) for f in self.pattern_files)
            if not files:
                raise ConfigError("pattern-files source requires a non-empty 'files' list")
            if len(counts) != 1 or counts[0] != len(files):
                raise ConfigError(
                    f"pattern-files source requires a single element count equal to the "
                    f"number of files ({len(files)}), got counts {counts}"
                )
            for f in files:
                if not f.exists():
                    raise ConfigError(f"referenced file does not exist: {f}")
            object.__setattr__(self, "pattern_files", files)
        if not (math.isfinite(self.cell_dy) and self.cell_dy > 0):
            raise ConfigError(f"dy must be positive, got {self.cell_dy!r}")
        if not (0.0 < self.efficiency_cap <= 1.0):
            raise ConfigError(f"cap must lie in (0, 1], got {self.efficiency_cap!r}")
        if self.efficiency_source == "touchstone-file":
            if self.touchstone_file is None or self.touchstone_frequency_hz is None:
                raise ConfigError(
                    "touchstone-file source requires both 'file' and 'frequency_hz'"
                )
            f = Path(self.touchstone_file)
            if not f.exists():
                raise ConfigError(f"referenced file does not exist: {f}")
            object.__setattr__(self, "touchstone_file", f)

    @property
    def snr_gamma(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)


@dataclass(frozen=True)
class SweepRow:
    """One element count of a sweep."""

    n_x: int
    spacing: float
    diversity: float
    mean_efficiency: float
    capacity_mean: float
    capacity_stderr: float

    def __post_init__(self) -> None:
        values = (
            self.spacing,
            self.diversity,
            self.mean_efficiency,
            self.capacity_mean,
            self.capacity_stderr,
        )
        if self.n_x < 1 or not all(math.isfinite(v) for v in values):
            raise ValueError(f"invalid sweep row {self!r}")


_SCENARIO_KEYS = {"aperture_lx", "element_counts", "snr_db", "realizations", "seed", "output"}
_CORRELATION_KEYS = {
    "analytic-2d": {"width_deg", "center_deg"},
    "analytic-3d": {"theta_min_deg", "theta_max_deg"},
    "synthesized-patterns": {"element", "q", "element_efficiency", "grid_step_deg"},
    "pattern-files": {"files"},
}
_EFFICIENCY_KEYS = {
    "unit": set(),
    "hannan": {"dy", "cap"},
    "touchstone-file": {"file", "frequency_hz"},
}


def parse_config(source: str | Path) -> ScenarioConfig:
    """Parse a scenario from a config file path or raw config text.

    A string containing a newline is treated as config text; anything else
    is a path.  Relative file references inside a config file resolve
    against the file's directory.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
        base_dir = source.parent
    elif "\n" in source:
        text = source
        base_dir = Path.cwd()
    else:
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"config file does not exist: {path}")
        text = path.read_text(encoding="utf-8")
        base_dir = path.parent

    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"invalid config: {exc}") from exc

    known_sections = {"scenario", "correlation", "efficiency"}
    for section in cp.sections():
        if section not in known_sections:
            raise ConfigError(f"unknown section [{section}]")
    for section in ("scenario", "correlation", "efficiency"):
        if not cp.has_section(section):
            raise ConfigError(f"missing required section [{section}]")

    scen = dict(cp.items("scenario"))
    for key in scen:
        if key not in _SCENARIO_KEYS:
            raise ConfigError(f"unknown key '{key}' in [scenario]")
    for key in ("aperture_lx", "element_counts"):
        if key not in scen:
            raise ConfigError(f"missing required key '{key}' in [scenario]")

    kwargs: dict = {
        "aperture_lx": _to_float("scenario", "aperture_lx", scen["aperture_lx"]),
        "element_counts": _to_counts(scen["element_counts"]),
    }
    if "snr_db" in scen:
        kwargs["snr_db"] = _to_float("scenario", "snr_db", scen["snr_db"])
    if "realizations" in scen:
        kwargs["realizations"] = _to_int("scenario", "realizations", scen["realizations"])
    if "seed" in scen:
        kwargs["seed"] = _to_int("scenario", "seed", scen["seed"])
    if "output" in scen:
        kwargs["output"] = _resolve(base_dir, scen["output"])

    kwargs.update(_parse_correlation_section(dict(cp.items("correlation")), base_dir))
    kwargs.update(_parse_efficiency_section(dict(cp.items("efficiency")), base_dir))
    return ScenarioConfig(**kwargs)


def _parse_correlation_section(items: dict, base_dir: Path) -> dict:
    if "source" not in items:
        raise ConfigError("missing required key 'source' in [correlation]")
    source = items.pop("source").strip()
    if source not in CORRELATION_SOURCES:
        raise ConfigError(
            f"unknown correlation source {source!r}; expected one of {CORRELATION_SOURCES}"
        )
    allowed = _CORRELATION_KEYS[source]
    for key in items:
        if key not in allowed:
            raise ConfigError(
                f"unknown key '{key}' in [correlation] for source '{source}'"
            )
    out: dict = {"correlation_source": source}
    if source == "analytic-2d":
        if "width_deg" in items:
            out["width_deg"] = _to_float("correlation", "width_deg", items["width_deg"])
        if "center_deg" in items:
            out["center_deg"] = _to_float("correlation", "center_deg", items["center_deg"])
    elif source == "analytic-3d":
        if "theta_min_deg" in items:
            out["theta_min_deg"] = _to_float(
                "correlation", "theta_min_deg", items["theta_min_deg"]
            )
        if "theta_max_deg" in items:
            out["theta_max_deg"] = _to_float(
                "correlation", "theta_max_deg", items["theta_max_deg"]
            )
    elif source == "synthesized-patterns":
        if "element" in items:
            out["element_model"] = items["element"].strip()
        if "q" in items:
            out["element_exponent"] = _to_float("correlation", "q", items["q"])
        if "element_efficiency" in items:
            out["element_efficiency"] = _to_float(
                "correlation", "element_efficiency", items["element_efficiency"]
            )
        if "grid_step_deg" in items:
            out["grid_step_deg"] = _to_float(
                "correlation", "grid_step_deg", items["grid_step_deg"]
            )
    else:  # pattern-files
        files = [f.strip() for f in items.get("files", "").split(",") if f.strip()]
        out["pattern_files"] = tuple(_resolve(base_dir, f) for f in files)
    return out


def _parse_efficiency_section(items: dict, base_dir: Path) -> dict:
    if "source" not in items:
        raise ConfigError("missing required key 'source' in [efficiency]")
    source = items.pop("source").strip()
    if source not in EFFICIENCY_SOURCES:
        raise ConfigError(
            f"unknown efficiency source {source!r}; expected one of {EFFICIENCY_SOURCES}"
        )
    allowed = _EFFICIENCY_KEYS[source]
    for key in items:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in [efficiency] for source '{source}'")
    out: dict = {"efficiency_source": source}
    if source == "hannan":
        if "dy" in items:
            out["cell_dy"] = _to_float("efficiency", "dy", items["dy"])
        if "cap" in items:
            out["efficiency_cap"] = _to_float("efficiency", "cap", items["cap"])
    elif source == "touchstone-file":
        if "file" in items:
            out["touchstone_file"] = _resolve(base_dir, items["file"])
        if "frequency_hz" in items:
            out["touchstone_frequency_hz"] = _to_float(
                "efficiency", "frequency_hz", items["frequency_hz"]
            )
    return out


def _to_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw.strip())
    except ValueError:
        raise ConfigError(
            f"invalid value for '{key}' in [{section}]: {raw.strip()!r} (expected a number)"
        ) from None


def _to_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(
            f"invalid value for '{key}' in [{section}]: {raw.strip()!r} (expected an integer)"
        ) from None


def _to_counts(raw: str) -> tuple[int, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError("element_counts must list at least one element count")
    counts = []
    for p in parts:
        try:
            counts.append(int(p))
        except ValueError:
            raise ConfigError(
                f"invalid value for 'element_counts' in [scenario]: {p!r} (expected an integer)"
            ) from None
    return tuple(counts)


def _resolve(base_dir: Path, raw: str) -> Path:
    p = Path(raw.strip())
    return p if p.is_absolute() else base_dir / p


class _SweepShared:
    """Inputs loaded once and reused, read-only, across sweep points."""

    def __init__(self, config: ScenarioConfig):
        self.n_half = saturation_count_1d(config.aperture_lx)
        self.base_pattern: RadiationPattern | None = None
        self.file_patterns: list[RadiationPattern] | None = None
        self.smatrix = None
        if config.correlation_source == "synthesized-patterns":
            grid = AngularGrid.with_resolution(config.grid_step_deg)
            if config.element_model == "isotropic":
                self.base_pattern = isotropic_pattern(grid)
            else:
                self.base_pattern = synthesize_isolated_pattern(
                    config.element_exponent, config.element_efficiency, grid
                )
        elif config.correlation_source == "pattern-files":
            self.file_patterns = [load_pattern_file(f) for f in config.pattern_files]
        if config.efficiency_source == "touchstone-file":
            self.smatrix = load_touchstone(
                config.touchstone_file, config.touchstone_frequency_hz
            )


def _correlation_for_layout(
    config: ScenarioConfig, shared: _SweepShared, layout: ArrayLayout
) -> CorrelationMatrix:
    source = config.correlation_source
    if source == "synthesized-patterns":
        patterns = [
            translate_pattern(shared.base_pattern, pos)
            for pos in layout.element_positions
        ]
        return correlation_matrix(patterns)
    if source == "pattern-files":
        return correlation_matrix(shared.file_patterns)

    if source == "analytic-2d":
        spread = AngularSpread2D(
            center_azimuth=math.radians(config.center_deg),
            width=math.radians(config.width_deg),
        )
        model = lambda d: clarke2d(d, spread).value  # noqa: E731
    else:
        polar = PolarRange3D(
            math.radians(config.theta_min_deg), math.radians(config.theta_max_deg)
        )
        model = lambda d: corr3d(d, polar).value  # noqa: E731

    separations = layout.pairwise_separations()
    cache: dict[float, complex] = {}
    n = layout.n_elements
    m = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            d = float(separations[i, j])
            if d not in cache:
                cache[d] = model(d)
            # rho(d) is <E(x) E(x+d)^*>, so the (i, j) entry with x_i < x_j
            # is its conjugate; real for broadside-centred spreads.
            m[i, j] = np.conj(cache[d])
            m[j, i] = cache[d]
    return CorrelationMatrix(m)


def _efficiency_for_layout(
    config: ScenarioConfig, shared: _SweepShared, layout: ArrayLayout
) -> EfficiencyVector:
    source = config.efficiency_source
    if source == "unit":
        return EfficiencyVector.unit(layout.n_elements)
    if source == "hannan":
        e = hannan_efficiency(layout.cell_dx, config.cell_dy, config.efficiency_cap)
        return EfficiencyVector(np.full(layout.n_elements, e))
    if shared.smatrix.n_ports != layout.n_elements:
        raise ConfigError(
            f"touchstone file has {shared.smatrix.n_ports} ports but the element "
            f"count is {layout.n_elements}"
        )
    return efficiency_vector(shared.smatrix)


def evaluate_count(
    config: ScenarioConfig, n_x: int, shared: _SweepShared | None = None
) -> SweepRow:
    """Diversity, mean efficiency and capacity for one element count."""
    if shared is None:
        shared = _SweepShared(config)
    layout = ArrayLayout.uniform_linear(n_x, config.aperture_lx, config.cell_dy)
    phi = _correlation_for_layout(config, shared, layout)
    eff = _efficiency_for_layout(config, shared, layout)
    scenario = ChannelScenario(
        n_t=n_x,
        n_r=n_x,
        snr_gamma=config.snr_gamma,
        spacing=layout.cell_dx,
        n_half_wavelength=shared.n_half,
    )
    estimate = ergodic_capacity(
        covariance(phi, eff), scenario, config.realizations, config.seed
    )
    return SweepRow(
        n_x=n_x,
        spacing=layout.cell_dx,
        diversity=diversity(phi),
        mean_efficiency=eff.mean(),
        capacity_mean=estimate.mean_bits_per_s_per_hz,
        capacity_stderr=estimate.std_error,
    )


def run_sweep(
    config: ScenarioConfig,
    out_path: str | Path | None = None,
    workers: int | None = None,
) -> list[SweepRow]:
    """Evaluate every element count of ``config`` and write the sweep CSV.

    Sweep points may be evaluated concurrently (``workers`` argument or the
    ``HOLOMIMO_WORKERS`` environment variable); rows are always assembled
    in element-count order and the CSV content does not depend on the
    worker count.  Nothing is written unless every point succeeds.
    """
    workers = _resolve_workers(workers)
    shared = _SweepShared(config)
    counts = config.element_counts
    if workers == 1 or len(counts) == 1:
        rows = [evaluate_count(config, n, shared) for n in counts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda n: evaluate_count(config, n, shared), counts))
    path = Path(out_path) if out_path is not None else config.output
    write_sweep_csv(rows, path)
    return rows


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        raw = os.environ.get(WORKERS_ENV_VAR, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigError(
                f"invalid {WORKERS_ENV_VAR} value {raw!r} (expected an integer)"
            ) from None
    workers = int(workers)
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1, got {workers}")
    return workers


def write_sweep_csv(rows, path) -> None:
    """Write sweep rows with a fixed schema and 9-significant-digit floats."""
    lines = [SWEEP_CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.n_x},{_fmt(r.spacing)},{_fmt(r.diversity)},{_fmt(r.mean_efficiency)},"
            f"{_fmt(r.capacity_mean)},{_fmt(r.capacity_stderr)}"
        )
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def emit_correlation_curve(
    model: str,
    d_values,
    path: str | Path | None = None,
    spread: AngularSpread2D | None = None,
    polar_range: PolarRange3D | None = None,
) -> list[tuple[float, float]]:
    """Correlation-vs-distance rows for external plotting, optionally as CSV.

    ``model`` selects :func:`clarke2d` (``"2d"``) or :func:`corr3d`
    (``"3d"``).  The emitted value is the real part of the correlation; it
    is the full complex value for every broadside-centred spread and every
    polar band, whose averages are real by symmetry.
    """
    if model not in ("2d", "3d"):
        raise ValueError(f"model must be '2d' or '3d', got {model!r}")
    d_values = np.asarray(d_values, dtype=float)
    if d_values.ndim != 1 or d_values.size == 0:
        raise ValueError("d-grid must be a non-empty 1-D array")
    if not np.all(np.isfinite(d_values)) or np.any(d_values < 0):
        raise ValueError("d-grid values must be finite and non-negative")
    rows = []
    for d in d_values:
        if model == "2d":
            value = clarke2d(float(d), spread).value.real
        else:
            value = corr3d(float(d), polar_range).value.real
        rows.append((float(d), value))
    if path is not None:
        lines = [CURVE_CSV_HEADER]
        lines.extend(f"{_fmt(d)},{_fmt(v)}" for d, v in rows)
        _atomic_write(Path(path), "\n".join(lines) + "\n")
    return rows


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

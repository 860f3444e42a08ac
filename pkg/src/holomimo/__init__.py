"""Correlation, aperture-limit and capacity analysis for dense MIMO arrays.

Lengths are in units of the carrier wavelength (``k0 = 2*pi``) everywhere.
"""

from .aperture import (
    ArrayLayout,
    EfficiencyVector,
    ScatteringMatrix,
    dof_limit_planar,
    efficiency_matrix,
    efficiency_vector,
    embedded_efficiency,
    hannan_efficiency,
    saturation_count_1d,
)
from .capacity import (
    CapacityEstimate,
    ChannelScenario,
    CovarianceMatrix,
    covariance,
    diversity,
    ergodic_capacity,
    hw_norm_target,
)
from .correlation import (
    AngularSpread2D,
    CorrelationValue,
    PolarRange3D,
    clarke2d,
    corr3d,
    planewave_superposition,
)
from .pattern_io import PatternFileError, load_pattern_file, save_pattern_file
from .patterns import (
    AngularGrid,
    AngularPowerSpectrum,
    CorrelationMatrix,
    RadiationPattern,
    correlation_matrix,
    ecc,
    isotropic_pattern,
    synthesize_isolated_pattern,
    translate_pattern,
)
from .scenarios import (
    ConfigError,
    ScenarioConfig,
    SweepRow,
    emit_correlation_curve,
    evaluate_count,
    parse_config,
    run_sweep,
    write_sweep_csv,
)
from .touchstone import TouchstoneError, load_touchstone

__version__ = "0.1.0"

__all__ = [
    "AngularGrid",
    "AngularPowerSpectrum",
    "AngularSpread2D",
    "ArrayLayout",
    "CapacityEstimate",
    "ChannelScenario",
    "ConfigError",
    "CorrelationMatrix",
    "CorrelationValue",
    "CovarianceMatrix",
    "EfficiencyVector",
    "PatternFileError",
    "PolarRange3D",
    "RadiationPattern",
    "ScatteringMatrix",
    "ScenarioConfig",
    "SweepRow",
    "TouchstoneError",
    "clarke2d",
    "corr3d",
    "correlation_matrix",
    "covariance",
    "diversity",
    "dof_limit_planar",
    "ecc",
    "efficiency_matrix",
    "efficiency_vector",
    "embedded_efficiency",
    "emit_correlation_curve",
    "ergodic_capacity",
    "evaluate_count",
    "hannan_efficiency",
    "hw_norm_target",
    "isotropic_pattern",
    "load_pattern_file",
    "load_touchstone",
    "parse_config",
    "planewave_superposition",
    "run_sweep",
    "saturation_count_1d",
    "save_pattern_file",
    "synthesize_isolated_pattern",
    "translate_pattern",
    "write_sweep_csv",
]

"""Closed-form spatial correlation models for multipath environments.

All distances are expressed in units of the carrier wavelength, so the
free-space wavenumber is fixed at ``k0 = 2*pi`` throughout the package.

Two models are provided, together with a brute-force plane-wave oracle:

* :func:`clarke2d` -- uniform plane waves arriving from an azimuthal
  sector.  For the full half-space sector (width ``pi``) this is Clarke's
  classic model and the correlation reduces to ``J0(k0*d)``.
* :func:`corr3d` -- uniform plane waves arriving from a polar-angle band
  with full azimuth coverage, weighted by ``sin(theta)`` as for any
  solid-angle average.  Over the full sphere the result is
  ``sin(k0*d)/(k0*d)``.
* :func:`planewave_superposition` -- the deterministic finite sum of
  discrete plane waves that both models idealise; it converges to
  :func:`clarke2d` as the number of waves grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

TWO_PI = 2.0 * math.pi

# Integrands are smooth and bounded, so plain adaptive quadrature with a
# tight absolute tolerance is sufficient everywhere in this module.
QUAD_ABS_TOL = 1e-8
QUAD_LIMIT = 200

_MAGNITUDE_TOL = 1e-6


@dataclass(frozen=True)
class AngularSpread2D:
    """Uniform azimuthal sector of incoming plane waves.

    Waves arrive uniformly from ``[center_azimuth - width/2,
    center_azimuth + width/2]``.  ``width`` must lie in ``(0, pi]``; the
    ``width = pi`` case is Clarke's half-space model.
    """

    center_azimuth: float = math.pi / 2
    width: float = math.pi

    def __post_init__(self) -> None:
        if not math.isfinite(self.center_azimuth):
            raise ValueError("center_azimuth must be finite")
        if not (0.0 < self.width <= math.pi):
            raise ValueError(
                f"angular-spread width must lie in (0, pi], got {self.width!r}"
            )

    @classmethod
    def clarke(cls) -> "AngularSpread2D":
        """The half-space sector [0, pi] of Clarke's model."""
        return cls(center_azimuth=math.pi / 2, width=math.pi)

    @property
    def lower(self) -> float:
        return self.center_azimuth - self.width / 2

    @property
    def upper(self) -> float:
        return self.center_azimuth + self.width / 2


@dataclass(frozen=True)
class PolarRange3D:
    """Polar-angle band ``theta_min <= theta <= theta_max`` with full azimuth."""

    theta_min: float = 0.0
    theta_max: float = math.pi

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta_min) and math.isfinite(self.theta_max)):
            raise ValueError("polar range bounds must be finite")
        if not (0.0 <= self.theta_min < self.theta_max <= math.pi):
            raise ValueError(
                "polar range must satisfy 0 <= theta_min < theta_max <= pi, "
                f"got [{self.theta_min!r}, {self.theta_max!r}]"
            )

    @classmethod
    def full_sphere(cls) -> "PolarRange3D":
        return cls(0.0, math.pi)

    @classmethod
    def half_space(cls) -> "PolarRange3D":
        """Upper half space, theta in [0, pi/2]."""
        return cls(0.0, math.pi / 2)


@dataclass(frozen=True)
class CorrelationValue:
    """Complex spatial correlation between two points."""

    value: complex

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value.real) and math.isfinite(self.value.imag)):
            raise ValueError("correlation value must be finite")
        if abs(self.value) > 1.0 + _MAGNITUDE_TOL:
            raise ValueError(
                f"|correlation| = {abs(self.value)!r} exceeds 1 beyond tolerance"
            )

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    def __abs__(self) -> float:
        return abs(self.value)


def _check_distance(d: float) -> float:
    d = float(d)
    if not math.isfinite(d):
        raise ValueError(f"separation must be finite, got {d!r}")
    if d < 0.0:
        raise ValueError(f"separation must be non-negative, got {d!r}")
    return d


def clarke2d(d: float, spread: AngularSpread2D | None = None) -> CorrelationValue:
    """Correlation of two points separated by ``d`` wavelengths in 2-D multipath.

    Averages ``exp(j*k0*d*cos(phi))`` over the azimuthal sector by adaptive
    quadrature.  With the default half-space sector the value is real and
    equals ``J0(2*pi*d)``.
    """
    d = _check_distance(d)
    if spread is None:
        spread = AngularSpread2D.clarke()
    if d == 0.0:
        return CorrelationValue(complex(1.0))
    z = TWO_PI * d
    re, _ = integrate.quad(
        lambda p: math.cos(z * math.cos(p)),
        spread.lower,
        spread.upper,
        epsabs=QUAD_ABS_TOL,
        limit=QUAD_LIMIT,
    )
    im, _ = integrate.quad(
        lambda p: math.sin(z * math.cos(p)),
        spread.lower,
        spread.upper,
        epsabs=QUAD_ABS_TOL,
        limit=QUAD_LIMIT,
    )
    return CorrelationValue(complex(re, im) / spread.width)


def corr3d(d: float, polar_range: PolarRange3D | None = None) -> CorrelationValue:
    """Correlation of two points separated by ``d`` wavelengths in 3-D multipath.

    The two points are separated in the plane of the array (perpendicular
    to the polar axis).  The solid-angle average of ``exp(j*k.r)`` over the
    band is normalised by its ``d = 0`` value; the azimuth integral is done
    in closed form (``2*pi*J0(k0*d*sin(theta))``) and the polar integral by
    adaptive quadrature.  The value is real by symmetry of the full azimuth
    circle.  Over the full sphere it equals ``sin(2*pi*d)/(2*pi*d)``.
    """
    d = _check_distance(d)
    if polar_range is None:
        polar_range = PolarRange3D.full_sphere()
    if d == 0.0:
        return CorrelationValue(complex(1.0))
    z = TWO_PI * d
    num, _ = integrate.quad(
        lambda t: special.j0(z * math.sin(t)) * math.sin(t),
        polar_range.theta_min,
        polar_range.theta_max,
        epsabs=QUAD_ABS_TOL,
        limit=QUAD_LIMIT,
    )
    den, _ = integrate.quad(
        math.sin,
        polar_range.theta_min,
        polar_range.theta_max,
        epsabs=QUAD_ABS_TOL,
        limit=QUAD_LIMIT,
    )
    return CorrelationValue(complex(num / den))


def planewave_superposition(
    d: float, spread: AngularSpread2D | None = None, n_waves: int = 10_000
) -> CorrelationValue:
    """Brute-force correlation from ``n_waves`` discrete plane waves.

    Deterministic sum over wave directions ``phi_n = lower + width*n/K``
    for ``n = 1..K``; converges to :func:`clarke2d` as ``K`` grows.
    """
    d = _check_distance(d)
    if spread is None:
        spread = AngularSpread2D.clarke()
    n_waves = int(n_waves)
    if n_waves < 1:
        raise ValueError(f"n_waves must be >= 1, got {n_waves}")
    if d == 0.0:
        return CorrelationValue(complex(1.0))
    n = np.arange(1, n_waves + 1)
    phi = spread.lower + spread.width * n / n_waves
    value = np.exp(1j * TWO_PI * d * np.cos(phi)).mean()
    return CorrelationValue(complex(value))

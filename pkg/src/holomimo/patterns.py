"""Far-field radiation patterns and the pattern-overlap correlation pipeline.

A pattern holds complex theta/phi-polarised field samples on a regular
angular grid.  The envelope-correlation integral between two patterns,
weighted by an angular power spectrum, yields the entries of the receive
correlation matrix; element translation only adds the direction-dependent
phase ``exp(j*k.r)``, which is how array geometry enters the pipeline.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi

_SPACING_TOL = 1e-9
_FULL_CIRCLE_TOL = 1e-8
_ENTRY_TOL = 1e-6
_DIAG_TOL = 1e-8


class AngularGrid:
    """Regular (theta, phi) sampling of the far-field sphere, in radians.

    ``theta`` must be strictly increasing and uniform within ``[0, pi]``;
    ``phi`` must be strictly increasing and uniform within ``[0, 2*pi)``
    and cover the full circle (``n_phi * dphi = 2*pi``), so that the
    periodic trapezoid rule applies along azimuth.
    """

    def __init__(self, theta: np.ndarray, phi: np.ndarray):
        theta = np.asarray(theta, dtype=float).copy()
        phi = np.asarray(phi, dtype=float).copy()
        for name, a in (("theta", theta), ("phi", phi)):
            if a.ndim != 1 or a.size < 2:
                raise ValueError(f"{name} samples must be a 1-D array of >= 2 angles")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} samples must be finite")
            steps = np.diff(a)
            if np.any(steps <= 0):
                raise ValueError(f"{name} samples must be strictly increasing")
            if np.any(np.abs(steps - steps[0]) > _SPACING_TOL):
                raise ValueError(f"{name} samples must be uniformly spaced")
        if theta[0] < -_SPACING_TOL or theta[-1] > math.pi + _SPACING_TOL:
            raise ValueError("theta samples must lie within [0, pi]")
        if phi[0] < -_SPACING_TOL or phi[-1] >= TWO_PI:
            raise ValueError("phi samples must lie within [0, 2*pi)")
        dphi = phi[1] - phi[0]
        if abs(phi.size * dphi - TWO_PI) > _FULL_CIRCLE_TOL:
            raise ValueError("phi samples must cover the full circle")
        theta.setflags(write=False)
        phi.setflags(write=False)
        self._theta = theta
        self._phi = phi

    @classmethod
    def with_resolution(cls, step_deg: float) -> "AngularGrid":
        """Grid with the given step in degrees over the full sphere."""
        step_deg = float(step_deg)
        if not (0 < step_deg <= 90) or abs(180.0 / step_deg - round(180.0 / step_deg)) > 1e-9:
            raise ValueError(f"step must be a positive divisor of 180 deg, got {step_deg!r}")
        n_theta = int(round(180.0 / step_deg)) + 1
        n_phi = int(round(360.0 / step_deg))
        theta = np.radians(np.arange(n_theta) * step_deg)
        phi = np.radians(np.arange(n_phi) * step_deg)
        return cls(theta, phi)

    @classmethod
    def one_degree(cls) -> "AngularGrid":
        return cls.with_resolution(1.0)

    @property
    def theta(self) -> np.ndarray:
        return self._theta

    @property
    def phi(self) -> np.ndarray:
        return self._phi

    @property
    def shape(self) -> tuple[int, int]:
        return (self._theta.size, self._phi.size)

    @cached_property
    def solid_angle_weights(self) -> np.ndarray:
        """Quadrature weights: trapezoid with sin(theta) in theta, periodic in phi."""
        dtheta = self._theta[1] - self._theta[0]
        w_theta = np.full(self._theta.size, dtheta)
        w_theta[0] = w_theta[-1] = dtheta / 2
        dphi = self._phi[1] - self._phi[0]
        w = np.outer(np.sin(self._theta) * w_theta, np.full(self._phi.size, dphi))
        w.setflags(write=False)
        return w

    def integrate(self, samples: np.ndarray) -> complex | float:
        """Solid-angle integral of ``samples`` over the grid."""
        samples = np.asarray(samples)
        if samples.shape != self.shape:
            raise ValueError(f"samples shape {samples.shape} != grid shape {self.shape}")
        return (samples * self.solid_angle_weights).sum()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AngularGrid):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self._theta, other._theta)
            and np.array_equal(self._phi, other._phi)
        )

    def __hash__(self) -> int:  # grids are immutable
        return hash((self._theta.tobytes(), self._phi.tobytes()))

    def __repr__(self) -> str:
        return f"AngularGrid(shape={self.shape})"


class RadiationPattern:
    """Complex theta/phi-polarised far-field samples on an :class:`AngularGrid`.

    Field values are in an arbitrary common scale; every consumer in this
    package is invariant to an overall positive scaling.
    """

    def __init__(self, grid: AngularGrid, e_theta: np.ndarray, e_phi: np.ndarray):
        e_theta = np.asarray(e_theta, dtype=complex).copy()
        e_phi = np.asarray(e_phi, dtype=complex).copy()
        if e_theta.shape != grid.shape or e_phi.shape != grid.shape:
            raise ValueError(
                f"sample shapes {e_theta.shape}, {e_phi.shape} do not match grid {grid.shape}"
            )
        if not (np.all(np.isfinite(e_theta)) and np.all(np.isfinite(e_phi))):
            raise ValueError("pattern samples must be finite")
        e_theta.setflags(write=False)
        e_phi.setflags(write=False)
        self._grid = grid
        self._e_theta = e_theta
        self._e_phi = e_phi
        if not self.total_radiated_power() > 0.0:
            raise ValueError("pattern must have strictly positive radiated power")

    @property
    def grid(self) -> AngularGrid:
        return self._grid

    @property
    def e_theta(self) -> np.ndarray:
        return self._e_theta

    @property
    def e_phi(self) -> np.ndarray:
        return self._e_phi

    def power_density(self) -> np.ndarray:
        return np.abs(self._e_theta) ** 2 + np.abs(self._e_phi) ** 2

    def total_radiated_power(self) -> float:
        return float(self._grid.integrate(self.power_density()).real)

    def directivity(self) -> float:
        """Peak directivity, 4*pi * max(U) / integral(U)."""
        u = self.power_density()
        return float(4 * math.pi * u.max() / self.total_radiated_power())


class AngularPowerSpectrum:
    """Angular power density of the propagation environment per polarisation.

    ``xpd`` is the cross-polarisation discrimination applied as a weight on
    the theta-polarised term of the overlap integrand.  The default
    (all-ones densities, ``xpd = 1``) is the isotropic-scattering,
    polarisation-balanced environment.
    """

    def __init__(
        self,
        grid: AngularGrid,
        p_theta: np.ndarray | None = None,
        p_phi: np.ndarray | None = None,
        xpd: float = 1.0,
    ):
        xpd = float(xpd)
        if not (math.isfinite(xpd) and xpd > 0):
            raise ValueError(f"xpd must be a positive finite scalar, got {xpd!r}")
        if p_theta is None:
            p_theta = np.ones(grid.shape)
        if p_phi is None:
            p_phi = np.ones(grid.shape)
        p_theta = np.asarray(p_theta, dtype=float).copy()
        p_phi = np.asarray(p_phi, dtype=float).copy()
        for name, p in (("p_theta", p_theta), ("p_phi", p_phi)):
            if p.shape != grid.shape:
                raise ValueError(f"{name} shape {p.shape} does not match grid {grid.shape}")
            if not np.all(np.isfinite(p)) or np.any(p < 0):
                raise ValueError(f"{name} must be finite and non-negative")
        if not (p_theta.any() or p_phi.any()):
            raise ValueError("angular power spectrum must not be identically zero")
        p_theta.setflags(write=False)
        p_phi.setflags(write=False)
        self.grid = grid
        self.p_theta = p_theta
        self.p_phi = p_phi
        self.xpd = xpd

    @classmethod
    def isotropic(cls, grid: AngularGrid) -> "AngularPowerSpectrum":
        return cls(grid)


def synthesize_isolated_pattern(
    exponent: float, efficiency: float = 0.95, grid: AngularGrid | None = None
) -> RadiationPattern:
    """Theta-polarised ``cos(theta)**q`` element over the upper hemisphere.

    The lower hemisphere is exactly zero (ideal reflector), which keeps the
    directivity in closed form: ``D = 2*(2q + 1)``, so ``q = 0.75`` gives
    the D = 5 element.  Samples are in sqrt-realized-gain scale, i.e. the
    total radiated power integrates to ``4*pi*efficiency`` and the peak
    power density is ``efficiency * D``.
    """
    exponent = float(exponent)
    if not (math.isfinite(exponent) and exponent >= 0):
        raise ValueError(f"exponent must be >= 0, got {exponent!r}")
    efficiency = float(efficiency)
    if not (0.0 < efficiency <= 1.0):
        raise ValueError(f"efficiency must lie in (0, 1], got {efficiency!r}")
    if grid is None:
        grid = AngularGrid.one_degree()
    amplitude = math.sqrt(2.0 * efficiency * (2.0 * exponent + 1.0))
    cos_t = np.cos(grid.theta)
    shape = np.where(grid.theta <= math.pi / 2, np.maximum(cos_t, 0.0) ** exponent, 0.0)
    e_theta = np.repeat((amplitude * shape)[:, None], grid.phi.size, axis=1)
    return RadiationPattern(grid, e_theta, np.zeros(grid.shape))


def isotropic_pattern(grid: AngularGrid | None = None) -> RadiationPattern:
    """Unit theta-polarised pattern, constant over the whole sphere."""
    if grid is None:
        grid = AngularGrid.one_degree()
    return RadiationPattern(grid, np.ones(grid.shape), np.zeros(grid.shape))


def translate_pattern(pattern: RadiationPattern, position) -> RadiationPattern:
    """Pattern of the same element moved to ``position`` (wavelength units).

    Each sample is multiplied by ``exp(j * k . r)`` where ``k`` is the
    propagation vector toward the sample's direction; magnitudes are
    unchanged everywhere.
    """
    r = np.asarray(position, dtype=float)
    if r.shape != (3,):
        raise ValueError(f"position must be a 3-vector, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise ValueError("position must be finite")
    grid = pattern.grid
    sin_t = np.sin(grid.theta)[:, None]
    cos_t = np.cos(grid.theta)[:, None]
    cos_p = np.cos(grid.phi)[None, :]
    sin_p = np.sin(grid.phi)[None, :]
    k_dot_r = TWO_PI * (r[0] * sin_t * cos_p + r[1] * sin_t * sin_p + r[2] * cos_t)
    phase = np.exp(1j * k_dot_r)
    return RadiationPattern(grid, pattern.e_theta * phase, pattern.e_phi * phase)


def ecc(
    pattern_m: RadiationPattern,
    pattern_n: RadiationPattern,
    spectrum: AngularPowerSpectrum | None = None,
) -> complex:
    """Complex pattern-overlap correlation between two patterns.

    ``rho = I_mn / sqrt(I_mm * I_nn)`` with the overlap integrand
    ``xpd * E_tm * conj(E_tn) * P_t + E_pm * conj(E_pn) * P_p`` integrated
    over the sphere.  Invariant to positive rescaling of either pattern.
    """
    grid = pattern_m.grid
    if pattern_n.grid != grid:
        raise ValueError("patterns must share the same angular grid")
    if spectrum is None:
        spectrum = AngularPowerSpectrum.isotropic(grid)
    elif spectrum.grid != grid:
        raise ValueError("angular power spectrum grid does not match the patterns")

    def self_overlap(p: RadiationPattern) -> float:
        g = (
            spectrum.xpd * np.abs(p.e_theta) ** 2 * spectrum.p_theta
            + np.abs(p.e_phi) ** 2 * spectrum.p_phi
        )
        return float(grid.integrate(g).real)

    d_m = self_overlap(pattern_m)
    if pattern_m is pattern_n:
        if d_m <= 0.0:
            raise ValueError("pattern has zero power under this spectrum")
        return complex(1.0)
    d_n = self_overlap(pattern_n)
    if d_m <= 0.0 or d_n <= 0.0:
        raise ValueError("pattern has zero power under this spectrum")
    g_mn = (
        spectrum.xpd * pattern_m.e_theta * np.conj(pattern_n.e_theta) * spectrum.p_theta
        + pattern_m.e_phi * np.conj(pattern_n.e_phi) * spectrum.p_phi
    )
    return complex(grid.integrate(g_mn) / math.sqrt(d_m * d_n))


class CorrelationMatrix:
    """Hermitian, unit-diagonal, positive-semidefinite correlation matrix.

    Construction validates Hermitian symmetry, the unit diagonal and the
    entry bound, then repairs indefiniteness: eigenvalues are floored at
    zero and the diagonal renormalised back to one.  Numerical overlap
    matrices can be indefinite at the 1e-9 scale, and downstream capacity
    evaluation requires a true PSD matrix.
    """

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=complex).copy()
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"correlation matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("correlation matrix entries must be finite")
        if np.abs(m - m.conj().T).max() > _ENTRY_TOL:
            raise ValueError("correlation matrix must be Hermitian")
        if np.abs(np.diagonal(m) - 1.0).max() > _DIAG_TOL:
            raise ValueError("correlation matrix diagonal must be 1")
        if np.abs(m).max() > 1.0 + _ENTRY_TOL:
            raise ValueError("correlation entries must have magnitude <= 1")
        m = 0.5 * (m + m.conj().T)
        eigvals = np.linalg.eigvalsh(m)
        if eigvals[0] < 0.0:
            m = _psd_floor(m)
        np.fill_diagonal(m, 1.0)
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dimension(self) -> int:
        return self._matrix.shape[0]

    def magnitude_squared(self) -> np.ndarray:
        """Entry-wise |rho|^2, the usual reporting form of the ECC."""
        return np.abs(self._matrix) ** 2

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self._matrix)

    @classmethod
    def identity(cls, n: int) -> "CorrelationMatrix":
        return cls(np.eye(n, dtype=complex))

    def __repr__(self) -> str:
        return f"CorrelationMatrix(dimension={self.dimension})"


def _psd_floor(m: np.ndarray) -> np.ndarray:
    """Floor negative eigenvalues at zero and renormalise the diagonal to 1."""
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    repaired = (v * w) @ v.conj().T
    diag = np.real(np.diagonal(repaired))
    if np.any(diag <= 0):
        raise ValueError("PSD repair produced a zero-power element")
    scale = 1.0 / np.sqrt(diag)
    return repaired * np.outer(scale, scale)


def correlation_matrix(
    patterns, spectrum: AngularPowerSpectrum | None = None
) -> CorrelationMatrix:
    """Pairwise :func:`ecc` matrix of a list of patterns on a common grid."""
    patterns = list(patterns)
    if not patterns:
        raise ValueError("at least one pattern is required")
    grid = patterns[0].grid
    for p in patterns[1:]:
        if p.grid != grid:
            raise ValueError("patterns must share the same angular grid")
    n = len(patterns)
    m = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            rho = ecc(patterns[i], patterns[j], spectrum)
            m[i, j] = rho
            m[j, i] = np.conj(rho)
    return CorrelationMatrix(m)

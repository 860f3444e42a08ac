"""Receive-side covariance and ergodic-capacity Monte Carlo.

The receive covariance combines the pattern correlation matrix with the
per-element embedded efficiencies; capacity is then the Monte Carlo mean
of ``log2 det(I + (gamma/Nt) R Hw Hw^H)`` over i.i.d. complex Gaussian
channels, with the channel norm pinned to the aperture-aware target: the
receive array gain stops growing once the element spacing drops below a
half wavelength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .aperture import EfficiencyVector
from .patterns import CorrelationMatrix

_LN2 = math.log(2.0)
_SQRT2 = math.sqrt(2.0)
_PSD_REJECT_SCALE = 1e-8
_CHUNK = 4096
_MAX_SEED = 2**64


class CovarianceMatrix:
    """Hermitian PSD receive covariance ``R_mn = rho_mn * sqrt(e_m * e_n)``."""

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=complex).copy()
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"covariance matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("covariance entries must be finite")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise ValueError("covariance matrix must be Hermitian")
        m = 0.5 * (m + m.conj().T)
        eigvals = np.linalg.eigvalsh(m)
        if eigvals[0] < -_PSD_REJECT_SCALE * m.shape[0]:
            raise ValueError(
                f"covariance matrix is not PSD (min eigenvalue {eigvals[0]:.3e})"
            )
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dimension(self) -> int:
        return self._matrix.shape[0]


@dataclass(frozen=True)
class ChannelScenario:
    """Link geometry and SNR for one capacity evaluation.

    ``snr_gamma`` is the total SNR in linear scale; ``spacing`` is the
    receive element spacing in wavelengths; ``n_half_wavelength`` is the
    element count of the same aperture at half-wavelength spacing, which
    caps the receive array gain below half-wavelength spacing.
    """

    n_t: int
    n_r: int
    snr_gamma: float
    spacing: float
    n_half_wavelength: int

    def __post_init__(self) -> None:
        if int(self.n_t) < 1 or int(self.n_r) < 1:
            raise ValueError("antenna counts must be >= 1")
        if not (math.isfinite(self.snr_gamma) and self.snr_gamma >= 0):
            raise ValueError(f"snr_gamma must be >= 0, got {self.snr_gamma!r}")
        if not (math.isfinite(self.spacing) and self.spacing > 0):
            raise ValueError(f"spacing must be positive, got {self.spacing!r}")
        if int(self.n_half_wavelength) < 1:
            raise ValueError("n_half_wavelength must be >= 1")


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte Carlo ergodic-capacity estimate."""

    mean_bits_per_s_per_hz: float
    std_error: float
    n_realizations: int
    seed: int

    def __post_init__(self) -> None:
        if self.mean_bits_per_s_per_hz < 0 or self.std_error < 0:
            raise ValueError("capacity mean and standard error must be >= 0")


def covariance(phi: CorrelationMatrix, e: EfficiencyVector) -> CovarianceMatrix:
    """Entry-wise product of the correlation matrix with ``sqrt(e) sqrt(e)^T``."""
    if phi.dimension != len(e):
        raise ValueError(
            f"dimension mismatch: correlation is {phi.dimension}, efficiencies {len(e)}"
        )
    root = np.sqrt(e.values)
    return CovarianceMatrix(phi.matrix * np.outer(root, root))


def hw_norm_target(scenario: ChannelScenario) -> float:
    """Expected squared Frobenius norm of the white channel matrix.

    ``Nt*Nr`` above half-wavelength spacing; ``Nt*N_half`` at or below it,
    because packing more receive elements into the fixed aperture stops
    adding array gain.
    """
    if scenario.spacing > 0.5:
        return float(scenario.n_t * scenario.n_r)
    return float(scenario.n_t * scenario.n_half_wavelength)


def _substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for realization ``index`` of stream ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def white_channel_block(
    seed: int, start: int, count: int, n_r: int, n_t: int
) -> np.ndarray:
    """Unit-variance i.i.d. complex Gaussian channels for realizations
    ``start .. start+count-1``.

    Realization ``i`` always draws from its own ``(seed, i)`` substream, so
    results do not depend on how realizations are chunked across workers.
    """
    out = np.empty((count, n_r, n_t), dtype=complex)
    for k in range(count):
        z = _substream(seed, start + k).standard_normal((2, n_r, n_t))
        out[k] = (z[0] + 1j * z[1]) / _SQRT2
    return out


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not (0 <= seed < _MAX_SEED):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return seed


def ergodic_capacity(
    r: CovarianceMatrix,
    scenario: ChannelScenario,
    n_realizations: int = 10_000,
    seed: int = 0,
) -> CapacityEstimate:
    """Monte Carlo mean of ``log2 det(I + (gamma/Nt) R Hw Hw^H)``.

    ``Hw`` entries are i.i.d. circularly-symmetric complex Gaussian scaled
    so the squared Frobenius norm equals :func:`hw_norm_target` in
    expectation (a hard per-realization norm would distort the fading
    statistics).  The log-det goes through the Hermitian factorization
    ``det(I + c * B B^H)`` with ``B = R^(1/2) Hw`` for numerical stability.
    Bit-exact reproducible for a given seed.
    """
    n_realizations = int(n_realizations)
    if n_realizations < 1:
        raise ValueError(f"n_realizations must be >= 1, got {n_realizations}")
    seed = _check_seed(seed)
    n_r, n_t = int(scenario.n_r), int(scenario.n_t)
    if r.dimension != n_r:
        raise ValueError(
            f"covariance dimension {r.dimension} does not match n_r = {n_r}"
        )

    w, v = np.linalg.eigh(r.matrix)
    if w[0] < -_PSD_REJECT_SCALE * n_r:
        raise ValueError(f"covariance matrix is not PSD (min eigenvalue {w[0]:.3e})")
    sqrt_r = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T

    scale = math.sqrt(hw_norm_target(scenario) / (n_t * n_r))
    c = scenario.snr_gamma / n_t
    eye = np.eye(n_r)

    caps = np.empty(n_realizations)
    for start in range(0, n_realizations, _CHUNK):
        count = min(_CHUNK, n_realizations - start)
        h = white_channel_block(seed, start, count, n_r, n_t) * scale
        b = sqrt_r @ h
        gram = b @ b.conj().swapaxes(-1, -2)
        _, logdet = np.linalg.slogdet(eye + c * gram)
        caps[start : start + count] = logdet / _LN2

    mean = float(caps.mean())
    std_error = float(caps.std(ddof=1) / math.sqrt(n_realizations)) if n_realizations > 1 else 0.0
    return CapacityEstimate(
        mean_bits_per_s_per_hz=mean,
        std_error=std_error,
        n_realizations=n_realizations,
        seed=seed,
    )


def diversity(phi: CorrelationMatrix | np.ndarray) -> float:
    """Effective number of uncorrelated branches, ``tr(phi)^2 / ||phi||_F^2``.

    Equals ``(sum sigma_i)^2 / sum sigma_i^2`` over the eigenvalues, so it
    lies in ``[1, N]`` for a unit-diagonal PSD matrix and is invariant
    under unitary conjugation.
    """
    m = phi.matrix if isinstance(phi, CorrelationMatrix) else np.asarray(phi)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.size == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    trace = float(np.trace(m).real)
    fro_sq = float((np.abs(m) ** 2).sum())
    if fro_sq == 0.0:
        raise ValueError("zero matrix has no diversity measure")
    return trace * trace / fro_sq

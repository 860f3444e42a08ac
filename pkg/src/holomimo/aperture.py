"""Array geometry, aperture DOF limits, and embedded-efficiency models.

A fixed aperture bounds both the number of usable spatial channels and,
through Hannan's gain limit for an embedded element, the radiation
efficiency each element can reach once the aperture is shared by many
cells.  Lengths are in carrier wavelengths throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_PASSIVITY_TOL = 1e-9
_INT_SNAP_TOL = 1e-9


def dof_limit_planar(aperture_l: float) -> float:
    """DOF limit ``pi * L**2`` of a square aperture of side ``L`` wavelengths.

    Ratio of the propagating-wavenumber disk ``pi*k0**2`` to the resolution
    cell ``(2*pi/L)**2`` of the aperture.
    """
    aperture_l = float(aperture_l)
    if not math.isfinite(aperture_l) or aperture_l < 0:
        raise ValueError(f"aperture length must be >= 0, got {aperture_l!r}")
    return math.pi * aperture_l * aperture_l


def saturation_count_1d(aperture_lx: float) -> int:
    """Element count ``2*Lx + 1`` beyond which a 1-D aperture adds no DOF.

    Equivalently the number of elements at half-wavelength spacing spanning
    the aperture.  The formula value is snapped to the nearest integer when
    within 1e-9 of one, otherwise truncated (a fractional element does not
    fit).
    """
    aperture_lx = float(aperture_lx)
    if not math.isfinite(aperture_lx) or aperture_lx < 0:
        raise ValueError(f"aperture length must be >= 0, got {aperture_lx!r}")
    value = 2.0 * aperture_lx + 1.0
    nearest = round(value)
    if abs(value - nearest) <= _INT_SNAP_TOL:
        return int(nearest)
    return int(math.floor(value))


def hannan_efficiency(cell_dx: float, cell_dy: float, cap: float = 0.95) -> float:
    """Embedded-efficiency upper bound ``min(cap, pi * dx * dy)`` of a cell.

    Hannan's limit caps an embedded element's gain at ``4*pi*dx*dy`` while
    dense-array patterns approach directivity 4, so the efficiency bound is
    ``pi*dx*dy``.  The ``cap`` models the high efficiency an isolated,
    well-matched element retains at large spacing, where the area bound is
    no longer the binding constraint.
    """
    cell_dx = float(cell_dx)
    cell_dy = float(cell_dy)
    if not (math.isfinite(cell_dx) and cell_dx > 0):
        raise ValueError(f"cell_dx must be positive, got {cell_dx!r}")
    if not (math.isfinite(cell_dy) and cell_dy > 0):
        raise ValueError(f"cell_dy must be positive, got {cell_dy!r}")
    cap = float(cap)
    if not (0.0 < cap <= 1.0):
        raise ValueError(f"cap must lie in (0, 1], got {cap!r}")
    return min(cap, math.pi * cell_dx * cell_dy)


@dataclass(frozen=True)
class ArrayLayout:
    """Element positions and unit-cell dimensions of a receive array."""

    element_positions: np.ndarray
    cell_dx: float
    cell_dy: float
    aperture_lx: float

    def __post_init__(self) -> None:
        pos = np.asarray(self.element_positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError(f"element_positions must have shape (N, 3), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("element positions must be finite")
        for i in range(pos.shape[0]):
            for j in range(i + 1, pos.shape[0]):
                if np.array_equal(pos[i], pos[j]):
                    raise ValueError(f"elements {i} and {j} share the same position")
        if not (math.isfinite(self.cell_dx) and self.cell_dx > 0):
            raise ValueError(f"cell_dx must be positive, got {self.cell_dx!r}")
        if not (math.isfinite(self.cell_dy) and self.cell_dy > 0):
            raise ValueError(f"cell_dy must be positive, got {self.cell_dy!r}")
        if not (math.isfinite(self.aperture_lx) and self.aperture_lx > 0):
            raise ValueError(f"aperture_lx must be positive, got {self.aperture_lx!r}")
        pos = pos.copy()
        pos.setflags(write=False)
        object.__setattr__(self, "element_positions", pos)

    @classmethod
    def uniform_linear(
        cls, n_elements: int, aperture_lx: float, cell_dy: float = 1.0
    ) -> "ArrayLayout":
        """``n`` elements along x, centred, with cell size ``Lx / n``.

        The aperture is shared cell-wise, so the element spacing equals the
        cell width ``dx = Lx / n``.
        """
        n_elements = int(n_elements)
        if n_elements < 1:
            raise ValueError(f"n_elements must be >= 1, got {n_elements}")
        aperture_lx = float(aperture_lx)
        if not (math.isfinite(aperture_lx) and aperture_lx > 0):
            raise ValueError(f"aperture_lx must be positive, got {aperture_lx!r}")
        dx = aperture_lx / n_elements
        x = (np.arange(n_elements) - (n_elements - 1) / 2.0) * dx
        pos = np.zeros((n_elements, 3))
        pos[:, 0] = x
        return cls(pos, cell_dx=dx, cell_dy=cell_dy, aperture_lx=aperture_lx)

    @property
    def n_elements(self) -> int:
        return self.element_positions.shape[0]

    @property
    def element_spacing(self) -> float:
        """Nearest-neighbour spacing; equals ``cell_dx`` for uniform 1-D layouts."""
        pos = self.element_positions
        if pos.shape[0] == 1:
            return self.cell_dx
        best = math.inf
        for i in range(pos.shape[0]):
            for j in range(i + 1, pos.shape[0]):
                best = min(best, float(np.linalg.norm(pos[i] - pos[j])))
        return best

    def pairwise_separations(self) -> np.ndarray:
        """Euclidean distance matrix between element positions."""
        pos = self.element_positions
        diff = pos[:, None, :] - pos[None, :, :]
        return np.linalg.norm(diff, axis=-1)


class ScatteringMatrix:
    """Single-frequency N-port S-parameters of a (passive) receive array."""

    def __init__(self, matrix: np.ndarray, frequency_hz: float | None = None):
        m = np.asarray(matrix, dtype=complex).copy()
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"scattering matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("scattering matrix entries must be finite")
        column_power = (np.abs(m) ** 2).sum(axis=0)
        worst = int(np.argmax(column_power))
        if column_power[worst] > 1.0 + _PASSIVITY_TOL:
            raise ValueError(
                f"port {worst} violates passivity: column power "
                f"{column_power[worst]:.12g} > 1"
            )
        m.setflags(write=False)
        self._matrix = m
        self.frequency_hz = None if frequency_hz is None else float(frequency_hz)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n_ports(self) -> int:
        return self._matrix.shape[0]


class EfficiencyVector:
    """Per-element embedded radiation efficiencies, each in [0, 1]."""

    def __init__(self, values) -> None:
        v = np.asarray(values, dtype=float).copy()
        if v.ndim != 1 or v.size < 1:
            raise ValueError(f"efficiencies must be a non-empty 1-D array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("efficiencies must be finite")
        if v.min() < -1e-12 or v.max() > 1.0 + 1e-12:
            raise ValueError(f"efficiencies must lie in [0, 1], got range [{v.min()}, {v.max()}]")
        v = np.clip(v, 0.0, 1.0)
        v.setflags(write=False)
        self._values = v

    @property
    def values(self) -> np.ndarray:
        return self._values

    def mean(self) -> float:
        return float(self._values.mean())

    def __len__(self) -> int:
        return self._values.size

    @classmethod
    def unit(cls, n: int) -> "EfficiencyVector":
        return cls(np.ones(int(n)))


def embedded_efficiency(s: ScatteringMatrix, n: int) -> float:
    """Embedded efficiency ``1 - sum_m |S_mn|**2`` of (0-based) port ``n``.

    Valid under negligible ohmic loss: whatever power is neither reflected
    at the fed port nor coupled into the other ports is radiated.
    """
    n = int(n)
    if not (0 <= n < s.n_ports):
        raise ValueError(f"port index {n} out of range for {s.n_ports}-port matrix")
    coupled = float((np.abs(s.matrix[:, n]) ** 2).sum())
    return min(1.0, max(0.0, 1.0 - coupled))


def efficiency_vector(s: ScatteringMatrix) -> EfficiencyVector:
    """Embedded efficiencies of all ports of ``s``."""
    return EfficiencyVector([embedded_efficiency(s, n) for n in range(s.n_ports)])


def efficiency_matrix(e: EfficiencyVector) -> np.ndarray:
    """Rank-1 efficiency matrix ``sqrt(e) * sqrt(e)^T``."""
    root = np.sqrt(e.values)
    return np.outer(root, root)

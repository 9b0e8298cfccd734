"""Pointwise electric and magnetic fields of a triple mode.

Fields are complex spatial mode functions; the factor exp(-i omega t) is not
included.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyGrid
from .medium import Region
from .modes import TripleMode


@dataclass(frozen=True)
class FieldSample:
    x: np.ndarray
    E: np.ndarray
    B: np.ndarray


@dataclass(frozen=True)
class ContinuityResidual:
    d_E_tan: float
    d_B_tan: float
    d_D_norm: float
    d_B_norm: float

    def max(self) -> float:
        return max(self.d_E_tan, self.d_B_tan, self.d_D_norm, self.d_B_norm)


@dataclass(frozen=True)
class Axis:
    start: float
    stop: float
    num: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid over x, y, z. Samples are ordered x-major, z fastest."""

    x: Axis = Axis(0.0, 0.0, 1)
    y: Axis = Axis(0.0, 0.0, 1)
    z: Axis = Axis(0.0, 0.0, 1)

    @property
    def size(self) -> int:
        return self.x.num * self.y.num * self.z.num

    def points(self) -> np.ndarray:
        X, Y, Z = np.meshgrid(self.x.values(), self.y.values(), self.z.values(), indexing="ij")
        return np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)


def _field(mode: TripleMode, x, which: str, region: Region | None = None) -> np.ndarray:
    """Field at points ``x`` (shape (..., 3)); ``region`` forces one side of z = 0."""
    x = np.asarray(x, dtype=float)
    kx, ky = mode.k_parallel
    phase_par = np.exp(1j * (kx * x[..., 0] + ky * x[..., 1]))
    z = x[..., 2]
    out = np.zeros(x.shape[:-1] + (3,), dtype=complex)
    for wave in mode.components:
        if region is None:
            mask = (z < 0) if wave.region is Region.NEGATIVE else (z >= 0)
        else:
            mask = np.full(z.shape, wave.region is region)
        amp = wave.E if which == "E" else wave.B
        # evaluate the exponential only where the wave lives; evanescent
        # components overflow on the wrong side
        zz = np.where(mask, z, 0.0)
        term = np.exp(1j * wave.K * zz) * mask
        out += (phase_par * term)[..., None] * amp
    return out


def eval_electric(mode: TripleMode, x: Sequence[float]) -> np.ndarray:
    return _field(mode, x, "E")


def eval_magnetic(mode: TripleMode, x: Sequence[float]) -> np.ndarray:
    return _field(mode, x, "B")


def probe_points(mode: TripleMode) -> np.ndarray:
    """Origin plus eight in-plane points within one incident wavelength."""
    wavelength = 2 * math.pi / (mode.kin.n_i * mode.omega)
    pts = [(0.0, 0.0, 0.0)]
    for j in range(8):
        radius = wavelength * (0.5 if j % 2 == 0 else 1.0)
        angle = j * math.pi / 4
        pts.append((radius * math.cos(angle), radius * math.sin(angle), 0.0))
    return np.array(pts)


def boundary_continuity_residual(mode: TripleMode) -> ContinuityResidual:
    """Largest jump across z = 0 of the four interface quantities."""
    pts = probe_points(mode)
    medium = mode.kin.medium
    E_minus = _field(mode, pts, "E", Region.NEGATIVE)
    E_plus = _field(mode, pts, "E", Region.POSITIVE)
    B_minus = _field(mode, pts, "B", Region.NEGATIVE)
    B_plus = _field(mode, pts, "B", Region.POSITIVE)
    d_E_tan = np.abs(E_minus[:, :2] - E_plus[:, :2]).max()
    d_B_tan = np.abs(B_minus[:, :2] - B_plus[:, :2]).max()
    D_minus = medium.n_left**2 * E_minus[:, 2]
    D_plus = medium.n_right**2 * E_plus[:, 2]
    d_D_norm = np.abs(D_minus - D_plus).max()
    d_B_norm = np.abs(B_minus[:, 2] - B_plus[:, 2]).max()
    return ContinuityResidual(float(d_E_tan), float(d_B_tan), float(d_D_norm), float(d_B_norm))


def sample_grid(mode: TripleMode, grid: GridSpec) -> list[FieldSample]:
    if grid.size < 1 or min(grid.x.num, grid.y.num, grid.z.num) < 1:
        raise EmptyGrid("grid has no points")
    for axis in (grid.x, grid.y, grid.z):
        if not (math.isfinite(axis.start) and math.isfinite(axis.stop)):
            raise EmptyGrid("grid extents must be finite")
    pts = grid.points()
    E = _field(mode, pts, "E")
    B = _field(mode, pts, "B")
    return [FieldSample(pts[j], E[j], B[j]) for j in range(len(pts))]

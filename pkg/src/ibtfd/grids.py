"""Uniform FFT grids, quadrature, spectral transforms and bilinear interpolation."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._kernels import bilinear_gather


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid: points x_min + i*dx, i = 0..n-1, dx = (x_max - x_min)/n."""

    n: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.n < 8 or not is_power_of_two(self.n):
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError(f"empty grid interval [{self.x_min}, {self.x_max})")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @cached_property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @cached_property
    def k_values(self) -> np.ndarray:
        """Spectral frequencies in FFT order, scaled by 2*pi/(n*dx)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @classmethod
    def centered(cls, n: int, halfwidth: float) -> "Grid1D":
        return cls(n=n, x_min=-halfwidth, x_max=halfwidth)


def integrate_1d(values: np.ndarray, grid: Grid1D) -> float:
    """Rectangle-rule quadrature; spectrally accurate for periodic band-limited data."""
    values = np.asarray(values)
    if values.shape[-1] != grid.n:
        raise ValueError(f"expected {grid.n} values, got {values.shape[-1]}")
    return float(np.sum(values, axis=-1) * grid.dx) if values.ndim == 1 \
        else np.sum(values, axis=-1) * grid.dx


@dataclass(frozen=True)
class Field2D:
    """Real scalar field on the (z, z~) grid product."""

    grid_z: Grid1D
    grid_zt: Grid1D
    values: np.ndarray = field(repr=False)

    def integrate(self) -> float:
        return float(self.values.sum() * self.grid_z.dx * self.grid_zt.dx)


def bilinear_sample(field2d: Field2D, z, zt):
    """Bilinear interpolation of a 2D field; points outside the grid give 0.

    Accepts scalars or broadcast-compatible arrays of query coordinates.
    """
    z = np.asarray(z, dtype=np.float64)
    zt = np.asarray(zt, dtype=np.float64)
    scalar = z.ndim == 0 and zt.ndim == 0
    z, zt = np.broadcast_arrays(z, zt)
    out = bilinear_gather(field2d.values,
                          field2d.grid_z.x_min, field2d.grid_z.dx,
                          field2d.grid_zt.x_min, field2d.grid_zt.dx,
                          z, zt)
    return out.item() if scalar else out


@dataclass
class WavefunctionGrid:
    """Complex amplitudes Phi(z_i, z~_j; t) on the 2D position grid."""

    grid_z: Grid1D
    grid_zt: Grid1D
    amplitudes: np.ndarray
    time: float = 0.0

    @property
    def cell_area(self) -> float:
        return self.grid_z.dx * self.grid_zt.dx

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.cell_area)

    def normalized(self) -> "WavefunctionGrid":
        return WavefunctionGrid(self.grid_z, self.grid_zt,
                                self.amplitudes / np.sqrt(self.norm_squared()),
                                self.time)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def marginal_z(self) -> np.ndarray:
        return self.density().sum(axis=1) * self.grid_zt.dx

    def marginal_zt(self) -> np.ndarray:
        return self.density().sum(axis=0) * self.grid_z.dx


def _check_pow2_axes(arr: np.ndarray, axes) -> tuple:
    if axes is None:
        axes = tuple(range(arr.ndim))
    elif np.isscalar(axes):
        axes = (int(axes),)
    for ax in axes:
        if not is_power_of_two(arr.shape[ax]):
            raise ValueError(
                f"axis {ax} has length {arr.shape[ax]}, not a power of two")
    return tuple(axes)


def fourier_forward(amplitudes: np.ndarray, axes=None) -> np.ndarray:
    """Unitary-normalized forward DFT over the selected axes."""
    axes = _check_pow2_axes(amplitudes, axes)
    return np.fft.fftn(amplitudes, axes=axes, norm="ortho")


def fourier_inverse(amplitudes: np.ndarray, axes=None) -> np.ndarray:
    """Unitary-normalized inverse DFT over the selected axes."""
    axes = _check_pow2_axes(amplitudes, axes)
    return np.fft.ifftn(amplitudes, axes=axes, norm="ortho")

"""Periodic spectral grids in one to three dimensions."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid centred on the origin.

    Axis ``k`` covers [-L_k/2, L_k/2) with ``points[k]`` samples (a power of two).
    Arrays on the grid use C order with axis 0 = x.
    """

    points: tuple[int, ...]
    lengths: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(int(n) for n in np.atleast_1d(self.points))
        lens = tuple(float(L) for L in np.atleast_1d(self.lengths))
        if len(lens) == 1 and len(pts) > 1:
            lens = lens * len(pts)
        if not 1 <= len(pts) <= 3:
            raise ValueError("grids have 1 to 3 dimensions")
        if len(lens) != len(pts):
            raise ValueError("points and lengths differ in dimension")
        for n in pts:
            if n < 2 or n & (n - 1):
                raise ValueError(f"points per axis must be a power of two, got {n}")
        for L in lens:
            if not (np.isfinite(L) and L > 0):
                raise ValueError("box lengths must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lengths", lens)

    @property
    def dims(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(-L / 2 + np.arange(n) * L / n for L, n in zip(self.lengths, self.points))

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        return tuple(2 * np.pi * np.fft.fftfreq(n, d=L / n) for L, n in zip(self.lengths, self.points))

    @cached_property
    def odd_wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Wavenumbers for odd-order derivatives: the Nyquist mode is zeroed."""
        out = []
        for k in self.wavenumbers:
            k = k.copy()
            k[len(k) // 2] = 0.0
            out.append(k)
        return tuple(out)

    def _bcast(self, arr, axis):
        shape = [1] * self.dims
        shape[axis] = -1
        return arr.reshape(shape)

    @cached_property
    def coords(self) -> np.ndarray:
        """Position of every grid point, shape (3, *shape); unused axes are 0."""
        out = np.zeros((3,) + self.shape)
        for a in range(self.dims):
            out[a] = self._bcast(self.axes[a], a)
        return out

    @cached_property
    def k_squared(self) -> np.ndarray:
        return sum(self._bcast(k, a) ** 2 for a, k in enumerate(self.wavenumbers))

    def kvec(self, axis: int, odd: bool = True) -> np.ndarray:
        ks = self.odd_wavenumbers if odd else self.wavenumbers
        return self._bcast(ks[axis], axis)

    def fft(self, f, axes=None):
        ax = tuple(range(-self.dims, 0)) if axes is None else axes
        return np.fft.fftn(f, axes=ax)

    def ifft(self, f, axes=None):
        ax = tuple(range(-self.dims, 0)) if axes is None else axes
        return np.fft.ifftn(f, axes=ax)

    def derivative(self, f, axis: int) -> np.ndarray:
        """Spectral d/dx_axis of ``f`` (trailing dims must match the grid)."""
        if axis >= self.dims:
            return np.zeros_like(f, dtype=complex)
        ax = f.ndim - self.dims + axis
        k = self.odd_wavenumbers[axis]
        shape = [1] * f.ndim
        shape[ax] = -1
        return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(f, axis=ax), axis=ax)

    def gradient(self, f) -> np.ndarray:
        """Stacked (d/dx, d/dy, d/dz) of ``f``; missing axes give zeros."""
        return np.stack([self.derivative(f, a) for a in range(3)])

    def laplacian(self, f) -> np.ndarray:
        return self.ifft(-self.k_squared * self.fft(f))

    def integrate(self, f) -> complex:
        return np.sum(f, axis=tuple(range(-self.dims, 0))) * self.cell_volume

    def is_commensurate(self, p, hbar: float = 1.0, tol: float = 1e-9) -> bool:
        p = np.asarray(p, dtype=float).reshape(-1)
        for a in range(3):
            pa = p[a] if a < p.size else 0.0
            if a >= self.dims:
                if pa != 0.0:
                    return False
                continue
            n = pa / hbar * self.lengths[a] / (2 * np.pi)
            if abs(n - round(n)) > tol:
                return False
        return True

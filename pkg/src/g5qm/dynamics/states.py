"""Wavefunctions on periodic grids and closed-form reference packets."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Grid


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    out = np.zeros(3)
    out[: a.size] = a
    return out


@dataclass
class ScalarWavefunction:
    grid: Grid
    psi: np.ndarray
    t: float = 0.0
    m: float = 1.0
    hbar: float = 1.0

    ncomp = 1

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != self.grid.shape:
            raise ValueError(f"amplitudes have shape {self.psi.shape}, grid is {self.grid.shape}")

    @property
    def components(self) -> np.ndarray:
        """Amplitudes as (ncomp, *grid.shape) (a view for scalars)."""
        return self.psi[None]

    def with_components(self, comps, t=None):
        return replace(self, psi=np.asarray(comps)[0], t=self.t if t is None else t)

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norm(self) -> float:
        return float(np.sum(self.density()) * self.grid.cell_volume)

    def copy(self):
        return replace(self, psi=self.psi.copy())


@dataclass
class PauliSpinor(ScalarWavefunction):
    """Two-component amplitudes ``psi`` of shape (2, *grid.shape)."""

    ncomp = 2

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (2,) + self.grid.shape:
            raise ValueError(f"spinor amplitudes must have shape (2, *{self.grid.shape})")

    @property
    def components(self):
        return self.psi

    def with_components(self, comps, t=None):
        return replace(self, psi=np.asarray(comps), t=self.t if t is None else t)

    def density(self):
        return np.sum(np.abs(self.psi) ** 2, axis=0)

    def spin_expectation(self) -> np.ndarray:
        """<sigma_x>, <sigma_y>, <sigma_z> (normalised by the state norm)."""
        from ..clifford import SIGMA

        flat = self.psi.reshape(2, -1)
        overlaps = np.conj(flat) @ flat.T  # <a|b>
        n = np.real(np.trace(overlaps))
        return np.real(np.einsum("ab,iab->i", overlaps, SIGMA)) / n


@dataclass(frozen=True)
class FreeGaussian:
    """Closed-form free Gaussian packet; ``width`` is the position spread at t0.

    Evaluation uses the exact solution of the free Schroedinger equation in
    every active dimension (product form).
    """

    center: np.ndarray
    momentum: np.ndarray
    width: float
    m: float = 1.0
    hbar: float = 1.0
    t0: float = 0.0
    dims: int = 3

    def __post_init__(self):
        object.__setattr__(self, "center", _vec3(self.center))
        object.__setattr__(self, "momentum", _vec3(self.momentum))

    def __call__(self, x, t: float) -> np.ndarray:
        """Amplitude at positions ``x`` of shape (3, ...) and time ``t``."""
        x = np.asarray(x, dtype=float)
        s0 = self.width
        tau = self.hbar * (t - self.t0) / (2 * self.m * s0**2)
        out = np.ones(x.shape[1:], dtype=complex)
        for a in range(self.dims):
            k0 = self.momentum[a] / self.hbar
            v = self.momentum[a] / self.m
            xi = x[a] - self.center[a]
            env = np.exp(-((xi - v * (t - self.t0)) ** 2) / (4 * s0**2 * (1 + 1j * tau)))
            phase = np.exp(1j * (k0 * xi - self.hbar * k0**2 * (t - self.t0) / (2 * self.m)))
            out = out * (2 * np.pi * s0**2) ** -0.25 / np.sqrt(1 + 1j * tau) * env * phase
        return out

    def width_at(self, t: float) -> float:
        tau = self.hbar * (t - self.t0) / (2 * self.m * self.width**2)
        return self.width * float(np.sqrt(1 + tau**2))


def make_gaussian(grid: Grid, center=0.0, momentum=0.0, width=1.0, m=1.0, hbar=1.0, spin=None, t=0.0):
    """Normalised Gaussian packet; ``spin`` (a 2-vector) makes a PauliSpinor."""
    g = FreeGaussian(center, momentum, width, m, hbar, t0=t, dims=grid.dims)
    psi = g(grid.coords, t)
    psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * grid.cell_volume)
    if spin is None:
        return ScalarWavefunction(grid, psi, t, m, hbar)
    chi = np.asarray(spin, dtype=complex)
    chi = chi / np.linalg.norm(chi)
    return PauliSpinor(grid, chi.reshape((2,) + (1,) * grid.dims) * psi[None], t, m, hbar)


def make_plane_wave(grid: Grid, p, m=1.0, hbar=1.0, spin=None, t=0.0):
    """Box-normalised plane wave exp(i p.x / hbar); ``p`` must sit on the Fourier lattice."""
    p = _vec3(p)
    if not grid.is_commensurate(p, hbar):
        raise ValueError(f"momentum {p} is not commensurate with the grid lattice")
    phase = np.tensordot(p, grid.coords, axes=(0, 0)) / hbar
    psi = np.exp(1j * phase) / np.sqrt(np.prod(grid.lengths))
    if spin is None:
        return ScalarWavefunction(grid, psi, t, m, hbar)
    chi = np.asarray(spin, dtype=complex)
    chi = chi / np.linalg.norm(chi)
    return PauliSpinor(grid, chi.reshape((2,) + (1,) * grid.dims) * psi[None], t, m, hbar)

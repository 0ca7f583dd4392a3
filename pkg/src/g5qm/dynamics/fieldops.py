"""Exact spectral resampling of grid fields: translations, shears, rotations."""
from __future__ import annotations

import math

import numpy as np

from .grid import Grid

# plane (a, b) rotated by a rotation about coordinate axis c
_PLANES = {0: (1, 2), 1: (2, 0), 2: (0, 1)}


def translate(f, grid: Grid, shift) -> np.ndarray:
    """g(x) = f(x - shift) by Fourier phase factors (trailing dims = grid)."""
    shift = np.asarray(shift, dtype=float).reshape(-1)
    F = grid.fft(f)
    phase = np.zeros(grid.shape)
    for a in range(grid.dims):
        if a < shift.size and shift[a] != 0.0:
            phase = phase - grid.kvec(a, odd=False) * shift[a]
    return grid.ifft(F * np.exp(1j * phase))


def shear(f, grid: Grid, along: int, by: int, amount: float) -> np.ndarray:
    """g(x) = f(x + amount * x_by e_along): exp(amount x_by d/dx_along) f."""
    if amount == 0.0:
        return f
    ax = f.ndim - grid.dims + along
    F = np.fft.fft(f, axis=ax)
    k = grid.kvec(along, odd=False)
    xb = grid.coords[by]
    F = F * np.exp(1j * k * amount * xb)
    return np.fft.ifft(F, axis=ax)


def rotate_plane(f, grid: Grid, axis: int, angle: float) -> np.ndarray:
    """g(x) = f(R^T x) with R the rotation by ``angle`` about coordinate ``axis``.

    Three shears: R^T = X(tan(a/2)) Y(-sin a) X(tan(a/2)) in the rotation plane.
    Large angles are split so every shear stays well conditioned.
    """
    if angle == 0.0:
        return f
    p, q = _PLANES[axis]
    if max(p, q) >= grid.dims:
        raise ValueError(f"rotation about axis {axis} needs a grid spanning axes {p} and {q}")
    pieces = max(1, math.ceil(abs(angle) / (math.pi / 4)))
    a = angle / pieces
    ta, sa = math.tan(a / 2), math.sin(a)
    g = f
    for _ in range(pieces):
        g = shear(g, grid, p, q, ta)
        g = shear(g, grid, q, p, -sa)
        g = shear(g, grid, p, q, ta)
    return g


def _euler_zyz(M):
    """Angles (alpha, beta, gamma) with M = Rz(alpha) Ry(beta) Rz(gamma)."""
    beta = math.atan2(math.hypot(M[0, 2], M[1, 2]), M[2, 2])
    if abs(math.sin(beta)) < 1e-12:
        alpha = math.atan2(M[1, 0], M[0, 0])
        if M[2, 2] < 0:
            alpha = math.atan2(-M[1, 0], -M[0, 0])
            return alpha, beta, 0.0
        return alpha, 0.0, 0.0
    alpha = math.atan2(M[1, 2], M[0, 2])
    gamma = math.atan2(M[2, 1], -M[2, 0])
    return alpha, beta, gamma


def rotate(f, grid: Grid, M) -> np.ndarray:
    """g(x) = f(M^T x) for a proper rotation matrix ``M``.

    On 2D grids ``M`` must be a rotation about z.
    """
    M = np.asarray(M, dtype=float)
    if grid.dims == 1:
        if np.allclose(M, np.eye(3), atol=1e-14):
            return f
        raise ValueError("cannot rotate a one-dimensional field")
    if grid.dims == 2:
        if abs(M[2, 2] - 1.0) > 1e-12:
            raise ValueError("2D grids only support rotations about z")
        return rotate_plane(f, grid, 2, math.atan2(M[1, 0], M[0, 0]))
    alpha, beta, gamma = _euler_zyz(M)
    # f(M^T x) with M = M1 M2 M3: apply M3 first
    g = rotate_plane(f, grid, 2, gamma)
    g = rotate_plane(g, grid, 1, beta)
    return rotate_plane(g, grid, 2, alpha)

"""Strang-split spectral propagation and observables."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..clifford import SIGMA
from . import fieldops
from .grid import Grid
from .states import PauliSpinor, ScalarWavefunction
from .terms import (
    MIXED,
    HamiltonianSpec,
    Kinetic,
    LinearPotential,
    MinimalCoupling,
    Potential,
    Rotation,
    SpinField,
    SpinMatrix,
)

log = logging.getLogger(__name__)

SEAM_WARN_LEVEL = 1e-10


def _as_spec(H) -> HamiltonianSpec:
    return H if isinstance(H, HamiltonianSpec) else HamiltonianSpec(H)


def _check_terms(state, H: HamiltonianSpec):
    kinetic = H.of_type(Kinetic) + H.of_type(MinimalCoupling)
    if len(kinetic) > 1:
        raise ValueError("at most one kinetic / minimal-coupling term is allowed")
    if H.has_spin and not isinstance(state, PauliSpinor):
        raise TypeError("spin terms need a PauliSpinor state")
    for term in H:
        if isinstance(term, Rotation) and state.grid.dims == 1:
            raise ValueError("rotation terms need at least two dimensions")


# ---------------------------------------------------------------------------
# exponentials of the individual pieces


def _hermitian_2x2_exp(M, tau):
    """exp(-i tau M) for Hermitian M of shape (2, 2, ...)."""
    a0 = 0.5 * np.real(M[0, 0] + M[1, 1])
    ax = np.real(M[0, 1] + M[1, 0]) / 2
    ay = np.real(1j * (M[0, 1] - M[1, 0])) / 2
    az = 0.5 * np.real(M[0, 0] - M[1, 1])
    r = np.sqrt(ax**2 + ay**2 + az**2)
    c = np.cos(tau * r)
    sinc = tau * np.sinc(tau * r / np.pi)  # sin(tau r) / r
    ph = np.exp(-1j * tau * a0)
    U = np.empty((2, 2) + np.shape(a0), dtype=complex)
    U[0, 0] = ph * (c - 1j * sinc * az)
    U[1, 1] = ph * (c + 1j * sinc * az)
    U[0, 1] = ph * (-1j * sinc * (ax - 1j * ay))
    U[1, 0] = ph * (-1j * sinc * (ax + 1j * ay))
    return U


def _position_factor(state, H, t, tau):
    """Apply exp(-i tau V(t) / hbar) for all position-diagonal terms."""
    grid = state.grid
    hbar = state.hbar
    V = np.zeros(grid.shape)
    spin = None
    for term in H:
        if isinstance(term, (LinearPotential, Potential)):
            V = V + term.values(grid, t)
        elif isinstance(term, SpinMatrix):
            M = term.matrix(t).reshape((2, 2) + (1,) * grid.dims)
            spin = M if spin is None else spin + M
        elif isinstance(term, SpinField):
            M = term.matrices(grid, t)
            spin = M if spin is None else spin + M
    comps = state.components
    if spin is None:
        return comps * np.exp(-1j * tau * V / hbar)
    M = spin + V * np.eye(2).reshape((2, 2) + (1,) * grid.dims)
    U = _hermitian_2x2_exp(M * np.ones((2, 2) + grid.shape), tau / hbar)
    return np.einsum("ab...,b...->a...", U, comps)


def _kinetic_factor(comps, grid: Grid, m, hbar, tau):
    phase = np.exp(-1j * tau * hbar * grid.k_squared / (2 * m))
    return grid.ifft(phase * grid.fft(comps))


def _rotation_matrix(axis_angle):
    """Rotation matrix for a rotation vector (Rodrigues)."""
    theta = float(np.linalg.norm(axis_angle))
    if theta == 0.0:
        return np.eye(3)
    k = axis_angle / theta
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(theta) * K + (1 - math.cos(theta)) * K @ K


def _rotation_factor(comps, grid, omega, tau):
    """exp(i tau omega.L / hbar): psi(x) -> psi(R(omega tau) x), exact via shears."""
    if not np.any(omega):
        return comps
    M = _rotation_matrix(omega * tau)
    # f(M x) = f((M^T)^T x)
    return np.stack([fieldops.rotate(c, grid, M.T) for c in comps])


def minimal_coupling_apply(comps, grid, m, hbar, em, t):
    """(p - e A / c)^2 / 2m applied spectrally to each component."""
    A = em.vector(grid, t)
    q = em.charge / em.c
    out = np.zeros_like(comps, dtype=complex)
    for a in range(grid.dims):
        Pi = -1j * hbar * grid.derivative(comps, a) - q * A[a] * comps
        out += -1j * hbar * grid.derivative(Pi, a) - q * A[a] * Pi
    # components along axes outside the grid only contribute A^2
    for a in range(grid.dims, 3):
        out += q**2 * A[a] ** 2 * comps
    return out / (2 * m)


def _taylor_expm_apply(op, v, tau, bound, tol=1e-16):
    """exp(-i tau op) v by scaled Taylor series; ``bound`` >= ||op||."""
    nsub = max(1, math.ceil(abs(tau) * bound / 0.5))
    h = tau / nsub
    for _ in range(nsub):
        term = v
        acc = v.copy()
        scale = max(np.max(np.abs(v)), 1e-300)
        for n in range(1, 60):
            term = (-1j * h / n) * op(term)
            acc = acc + term
            if np.max(np.abs(term)) < tol * scale:
                break
        v = acc
    return v


def _minimal_coupling_factor(comps, grid, m, hbar, em, t, tau):
    A = em.vector(grid, t)
    q = em.charge / em.c
    kmax = np.sqrt(sum(np.max(k**2) for k in grid.wavenumbers))
    pmax = hbar * kmax + q * float(np.max(np.sqrt(np.sum(A**2, axis=0))))
    bound = pmax**2 / (2 * m) / hbar
    op = lambda f: minimal_coupling_apply(f, grid, m, hbar, em, t) / hbar
    return _taylor_expm_apply(op, comps, tau, bound)


# ---------------------------------------------------------------------------


def step(state, H, dt: float, t_eval: float | None = None):
    """One second-order Strang step: V/2, R/2, K, R/2, V/2.

    Time-dependent terms are evaluated at ``t_eval`` (default: the midpoint).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    H = _as_spec(H)
    _check_terms(state, H)
    grid, hbar = state.grid, state.hbar
    tm = state.t + 0.5 * dt if t_eval is None else t_eval

    comps = _position_factor(state, H, tm, 0.5 * dt)
    rotations = H.of_type(Rotation)
    omega = sum((r.vector(tm) for r in rotations), np.zeros(3))
    comps = _rotation_factor(comps, grid, omega, 0.5 * dt)
    for term in H:
        if isinstance(term, Kinetic):
            comps = _kinetic_factor(comps, grid, term.m, hbar, dt)
        elif isinstance(term, MinimalCoupling):
            comps = _minimal_coupling_factor(comps, grid, term.m, hbar, term.em, tm, dt)
    comps = _rotation_factor(comps, grid, omega, 0.5 * dt)
    mid = state.with_components(comps)
    comps = _position_factor(mid, H, tm, 0.5 * dt)
    return state.with_components(comps, t=state.t + dt)


@dataclass
class Observables:
    t: float
    norm: float
    mean_x: np.ndarray
    mean_p: np.ndarray
    var_x: float
    var_p: float
    energy: float

    def row(self) -> list:
        return [self.t, self.norm, *self.mean_x, *self.mean_p, self.var_x, self.var_p, self.energy]


def _momentum_moments(state):
    grid = state.grid
    F = grid.fft(state.components)
    w = np.sum(np.abs(F) ** 2, axis=0)
    w = w / np.sum(w)
    mean = np.zeros(3)
    second = 0.0
    for a in range(grid.dims):
        k = grid.kvec(a, odd=False) * state.hbar
        mean[a] = np.sum(w * k)
        second += np.sum(w * k**2)
    return mean, float(second - mean @ mean)


def angular_momentum(state) -> np.ndarray:
    """<L> = <x cross p> computed spectrally (normalised)."""
    grid = state.grid
    comps = state.components
    grads = [(-1j * state.hbar) * grid.derivative(comps, a) for a in range(3)]
    x = grid.coords
    rho = 0.0
    L = np.zeros(3)
    for c in range(comps.shape[0]):
        f = comps[c]
        rho += np.sum(np.abs(f) ** 2)
        for i, (j, k) in enumerate(((1, 2), (2, 0), (0, 1))):
            L[i] += np.real(np.sum(np.conj(f) * (x[j] * grads[k][c] - x[k] * grads[j][c])))
    return L / rho


def apply_hamiltonian(state, H, t=None) -> np.ndarray:
    """H psi as an array shaped like ``state.components``."""
    H = _as_spec(H)
    t = state.t if t is None else t
    grid, hbar = state.grid, state.hbar
    comps = state.components
    out = np.zeros_like(comps, dtype=complex)
    for term in H:
        if isinstance(term, Kinetic):
            out += grid.ifft(hbar**2 * grid.k_squared / (2 * term.m) * grid.fft(comps))
        elif isinstance(term, MinimalCoupling):
            out += minimal_coupling_apply(comps, grid, term.m, hbar, term.em, t)
        elif isinstance(term, (LinearPotential, Potential)):
            out += term.values(grid, t) * comps
        elif isinstance(term, Rotation):
            w = term.vector(t)
            x = grid.coords
            grads = [(-1j * hbar) * grid.derivative(comps, a) for a in range(3)]
            for i, (j, k) in enumerate(((1, 2), (2, 0), (0, 1))):
                if w[i] != 0.0:
                    out += -w[i] * (x[j] * grads[k] - x[k] * grads[j])
        elif isinstance(term, SpinMatrix):
            out += np.einsum("ab,b...->a...", term.matrix(t), comps)
        elif isinstance(term, SpinField):
            out += np.einsum("ab...,b...->a...", term.matrices(grid, t), comps)
    return out


def energy(state, H, t=None) -> float:
    Hpsi = apply_hamiltonian(state, H, t)
    num = np.sum(np.conj(state.components) * Hpsi)
    return float(np.real(num) / np.sum(np.abs(state.components) ** 2))


def observables(state, H=None) -> Observables:
    grid = state.grid
    rho = state.density()
    n = float(np.sum(rho) * grid.cell_volume)
    w = rho / np.sum(rho)
    x = grid.coords
    mean_x = np.array([np.sum(w * x[a]) for a in range(3)])
    var_x = float(sum(np.sum(w * (x[a] - mean_x[a]) ** 2) for a in range(grid.dims)))
    mean_p, var_p = _momentum_moments(state)
    E = energy(state, H) if H is not None else float("nan")
    return Observables(state.t, n, mean_x, mean_p, var_x, var_p, E)


def seam_weight(state, fraction: float = 1 / 16) -> float:
    """Probability within ``fraction`` of the box from any periodic seam."""
    grid = state.grid
    rho = state.density()
    mask = np.zeros(grid.shape, dtype=bool)
    for a in range(grid.dims):
        edge = np.abs(grid.coords[a]) >= grid.lengths[a] * (0.5 - fraction)
        mask |= edge
    return float(np.sum(rho[mask]) / np.sum(rho))


def evolve(state, H, t0: float | None = None, t1: float = 1.0, nsteps: int = 100, stride: int = 0, record_energy=True):
    """Advance ``state`` from t0 to t1 in ``nsteps`` Strang steps.

    Returns (final_state, records); ``records`` holds Observables every
    ``stride`` steps (first and last included) when stride > 0.
    """
    if nsteps < 1:
        raise ValueError("nsteps must be >= 1")
    H = _as_spec(H)
    if t0 is not None:
        state = state.with_components(state.components, t=t0)
    dt = (t1 - state.t) / nsteps
    records = []
    Hobs = H if record_energy else None
    if stride:
        records.append(observables(state, Hobs))
    linear = bool(H.of_type(LinearPotential))
    for n in range(1, nsteps + 1):
        state = step(state, H, dt)
        if not np.all(np.isfinite(state.components)):
            raise FloatingPointError(f"non-finite amplitudes after step {n} (t={state.t:.6g})")
        if stride and (n % stride == 0 or n == nsteps):
            records.append(observables(state, Hobs))
            if linear and seam_weight(state) > SEAM_WARN_LEVEL:
                warnings.warn(
                    f"packet approaches the periodic seam at t={state.t:.4g}; linear potential is discontinuous there",
                    RuntimeWarning,
                    stacklevel=2,
                )
    return state, records

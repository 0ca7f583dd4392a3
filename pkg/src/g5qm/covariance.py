"""Frame changes of wavefunctions and the covariance / equivalence experiments.

A state seen from the frame ``tr`` (x' = R(t) x + A(t)) is

    psi'(x', t) = exp(i m u dx5 / hbar) psi(x, t),   x = R^T (x' - A),

where u dx5 = x5_shift(tr, x, t).  The bookkeeping scale u cancels from the
phase, which is why results are u-independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import fieldops, solver
from .dynamics.states import PauliSpinor
from .dynamics.terms import (
    HamiltonianSpec,
    Kinetic,
    h_inert,
    newton_coupling,
    spin_rotation_term,
)
from .geometry5 import Accel, FrameTrajectory, Rotate, frame_phase, x5_shift

ROTATION_TOL = 1e-14


@dataclass(frozen=True)
class FrameMap:
    """Pairing of the inertial frame S0 with the frame S described by ``tr``.

    ``forward`` maps S0 states to S; the inverse map goes back.
    """

    tr: FrameTrajectory
    forward: bool = True

    def inverse(self) -> "FrameMap":
        return FrameMap(self.tr, not self.forward)


@dataclass
class ComparisonReport:
    l2_distance: float
    fidelity: float
    max_density_diff: float

    def as_dict(self) -> dict:
        return {
            "l2_distance": self.l2_distance,
            "fidelity": self.fidelity,
            "max_density_diff": self.max_density_diff,
        }


def compare(a, b) -> ComparisonReport:
    """L2 distance, overlap modulus and max density difference of two states."""
    if a.grid != b.grid:
        raise ValueError("states live on different grids")
    dv = a.grid.cell_volume
    ca, cb = a.components, b.components
    l2 = math.sqrt(float(np.sum(np.abs(ca - cb) ** 2)) * dv)
    overlap = abs(np.sum(np.conj(ca) * cb)) * dv
    fid = overlap / math.sqrt(a.norm() * b.norm())
    drho = float(np.max(np.abs(a.density() - b.density())))
    return ComparisonReport(l2, float(fid), drho)


def _is_identity(R) -> bool:
    return bool(np.max(np.abs(R - np.eye(3))) < ROTATION_TOL)


def _frame_coords(grid, R, A):
    """Inertial coordinates x = R^T (x' - A) of the frame grid points."""
    xp = grid.coords - A.reshape((3,) + (1,) * grid.dims)
    return np.tensordot(R.T, xp, axes=(1, 0))


def transform_state(fmap: FrameMap, state, analytic=None, resample_rotations: bool = False):
    """Map ``state`` (at time state.t) through ``fmap``.

    Parameters
    ----------
    analytic : callable (x, t) -> amplitudes, optional
        Closed-form description of the *source* state.  When given, the new
        amplitudes are obtained by evaluating it at the mapped points, which
        handles rotations without any resampling.
    resample_rotations : bool
        Permit grid rotations by exact three-shear Fourier resampling.  This is
        exact for band-limited fields well inside the box; it is off by default
        because periodic images make it inexact for wide states.

    Spinor components are transformed alike (the spin frame is not rotated).
    """
    tr, t, grid = fmap.tr, state.t, state.grid
    m, hbar = state.m, state.hbar
    R = tr.rotation_derivs(t)[0]
    A = tr.translation_derivs(t)[0]
    comps = state.components
    rotating = not _is_identity(R)

    if fmap.forward:
        # psi'(x') = exp(i m S(x') / hbar) psi(R^T (x' - A))
        phase = np.exp(1j * m * frame_phase(tr, grid.coords, t) / hbar)
        if analytic is not None:
            moved = np.asarray(analytic(_frame_coords(grid, R, A), t))
            moved = moved.reshape(comps.shape)
        else:
            if rotating and not resample_rotations:
                raise ValueError("rotation of a grid state needs an analytic description or resample_rotations=True")
            moved = np.stack([fieldops.rotate(c, grid, R) for c in comps]) if rotating else comps
            moved = fieldops.translate(moved, grid, A)
        return state.with_components(phase * moved)

    # inverse: psi(x) = exp(-i m S(x) / hbar) psi'(R x + A)
    phase = np.exp(-1j * m * x5_shift(tr, grid.coords, t) / hbar)
    if analytic is not None:
        xp = np.tensordot(R, grid.coords, axes=(1, 0)) + A.reshape((3,) + (1,) * grid.dims)
        moved = np.asarray(analytic(xp, t)).reshape(comps.shape)
    else:
        if rotating and not resample_rotations:
            raise ValueError("rotation of a grid state needs an analytic description or resample_rotations=True")
        moved = fieldops.translate(comps, grid, -A)
        if rotating:
            moved = np.stack([fieldops.rotate(c, grid, R.T) for c in moved])
    return state.with_components(phase * moved)


def frame_hamiltonian(tr: FrameTrajectory, m: float, extra=()) -> HamiltonianSpec:
    """Kinetic term plus the inertial-force terms of ``tr`` (and ``extra``)."""
    return HamiltonianSpec([Kinetic(m), *h_inert(tr, m), *extra])


@dataclass
class CovarianceResult:
    report: ComparisonReport
    state_a: object
    state_b: object
    series_a: list = field(default_factory=list)
    series_b: list = field(default_factory=list)


def covariance_residual(tr: FrameTrajectory, psi0, T: float, nsteps: int, analytic=None,
                        resample_rotations: bool = False, stride: int = 0) -> CovarianceResult:
    """Compare the two routes from an S0 state at t0 to the frame S at t0 + T.

    Path A evolves freely in S0 and transforms at the end.  Path B transforms
    first and evolves under kinetic + h_inert(tr).  Both use ``nsteps`` steps.

    ``analytic`` is a closed-form solution psi(x, t) of the free problem with
    psi(., t0) = psi0; when given it supplies the exact S0 state for the
    transforms (needed for rotating frames).
    """
    t1 = psi0.t + T
    m = psi0.m
    a_end, series_a = solver.evolve(psi0, HamiltonianSpec([Kinetic(m)]), t1=t1, nsteps=nsteps, stride=stride)
    fwd = FrameMap(tr)
    if analytic is not None:
        exact = a_end.with_components(np.asarray(analytic(a_end.grid.coords, t1)).reshape(a_end.components.shape))
        path_a = transform_state(fwd, exact, analytic=analytic)
    else:
        path_a = transform_state(fwd, a_end, resample_rotations=resample_rotations)

    b0 = transform_state(fwd, psi0, analytic=analytic, resample_rotations=resample_rotations)
    H = frame_hamiltonian(tr, m)
    path_b, series_b = solver.evolve(b0, H, t1=t1, nsteps=nsteps, stride=stride)
    return CovarianceResult(compare(path_a, path_b), path_a, path_b, series_a, series_b)


def fit_slope(t, y, middle: float = 0.8) -> tuple[np.ndarray, float]:
    """Least-squares slope of y(t) (rows = samples) over the middle fraction."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    n = t.size
    cut = int(round(n * (1 - middle) / 2))
    sel = slice(cut, n - cut) if n - 2 * cut >= 2 else slice(None)
    ts, ys = t[sel], y[sel]
    X = np.stack([ts - ts.mean(), np.ones_like(ts)], axis=1)
    coef, *_ = np.linalg.lstsq(X, ys, rcond=None)
    resid = ys - X @ coef
    return coef[0], float(np.max(np.abs(resid)))


@dataclass
class EquivalenceReport:
    g: np.ndarray
    a: np.ndarray
    fitted_slope: np.ndarray
    expected_slope: np.ndarray
    residual: float
    density_vs_free: float | None
    series: list = field(default_factory=list)
    final_state: object = None

    @property
    def slope_error(self) -> float:
        return float(np.max(np.abs(self.fitted_slope - self.expected_slope)))


def equivalence_principle_run(g, a, psi0, T: float, nsteps: int) -> EquivalenceReport:
    """Evolve in the frame A(t) = a t^2 / 2 under gravity Phi = g.x.

    The potential seen in the frame is m g.x' + h_inert = m (g - a).x' (the
    spatially constant part of m g.x only adds a global phase and is omitted).
    d<p>/dt is fitted and compared with -m (g - a).  When a == g the density is
    also compared with free evolution.
    """
    g = np.asarray(g, dtype=float).reshape(3)
    a = np.asarray(a, dtype=float).reshape(3)
    m = psi0.m
    tr = Accel(a)
    # m g.x' and -m a.x' are summed pointwise, so a == g cancels exactly
    H = frame_hamiltonian(tr, m, newton_coupling(g, m))
    final, series = solver.evolve(psi0, H, t1=psi0.t + T, nsteps=nsteps, stride=1, record_energy=False)
    ts = [r.t for r in series]
    ps = [r.mean_p for r in series]
    slope, resid = fit_slope(ts, ps)
    dens = None
    if np.array_equal(g, a):
        free, _ = solver.evolve(psi0, HamiltonianSpec([Kinetic(m)]), t1=psi0.t + T, nsteps=nsteps)
        dens = float(np.max(np.abs(final.density() - free.density())))
    return EquivalenceReport(g, a, np.asarray(slope), -m * (g - a), resid, dens, series, final)


@dataclass
class PrecessionReport:
    axis: np.ndarray
    frequency: float
    times: np.ndarray
    spin: np.ndarray
    max_fit_residual: float


def precession_fit(times, spin) -> PrecessionReport:
    """Axis and angular frequency of a rigid precession s(t) = R(n, W t) s(0).

    The axis carries the sense of rotation: counter-clockwise about +axis.
    """
    times = np.asarray(times, dtype=float)
    spin = np.asarray(spin, dtype=float)
    # successive displacements of the tip lie in the plane normal to the axis
    d = np.diff(spin, axis=0)
    cs = np.cross(d[:-1], d[1:]).sum(axis=0)
    if spin.shape[0] < 3 or np.linalg.norm(cs) < 1e-300:
        return PrecessionReport(np.zeros(3), 0.0, times, spin, 0.0)
    n = cs / np.linalg.norm(cs)
    perp = spin - np.outer(spin @ n, n)
    ang = np.unwrap(np.arctan2(np.cross(perp[0], perp) @ n, perp @ perp[0]))
    X = np.stack([times - times[0], np.ones_like(times)], axis=1)
    coef, *_ = np.linalg.lstsq(X, ang, rcond=None)
    resid = float(np.max(np.abs(ang - X @ coef)))
    W = coef[0]
    if W < 0:
        n, W = -n, -W
    return PrecessionReport(n, float(W), times, spin, resid)


def _spin_series(state, H, T, nsteps):
    times = [state.t]
    spins = [state.spin_expectation()]
    for _ in range(nsteps):
        state = solver.step(state, H, T / nsteps)
        times.append(state.t)
        spins.append(state.spin_expectation())
    return state, np.array(times), np.array(spins)


def spin_frame_run(omega, spinor0: PauliSpinor, T: float, nsteps: int):
    """Evolve ``spinor0`` under the spin inertial term of a frame spinning at ``omega``.

    The gauge rotation is the frame rotation itself.  Returns the precession
    fit and the final state.
    """
    omega = np.asarray(omega, dtype=float).reshape(3)
    w = float(np.linalg.norm(omega))
    tr = Rotate(omega if w else [0, 0, 1], w)
    H = HamiltonianSpec([spin_rotation_term(tr, spinor0.hbar)])
    final, times, spins = _spin_series(spinor0, H, T, nsteps)
    return precession_fit(times, spins), final


def larmor_run(terms, spinor0: PauliSpinor, T: float, nsteps: int):
    """Spin precession of ``spinor0`` under an arbitrary spin Hamiltonian."""
    H = terms if isinstance(terms, HamiltonianSpec) else HamiltonianSpec(terms)
    final, times, spins = _spin_series(spinor0, H, T, nsteps)
    return precession_fit(times, spins), final

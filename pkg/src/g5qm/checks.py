"""Invariant suites and independent numerical oracles.

Each check returns a :class:`CheckResult`; ``g5 check`` and the acceptance
tests run the same functions.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import clifford, geometry5, group5
from .dynamics.grid import Grid
from .dynamics.terms import uniform_magnetic_field


@dataclass
class CheckResult:
    name: str
    value: float
    tol: float
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value < self.tol)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: {self.value:.3e} (tol {self.tol:.1e}, {self.seconds:.2f}s)"


def _timed(name, tol, fn):
    t0 = time.perf_counter()
    val = float(fn())
    return CheckResult(name, val, tol, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# random generators


def random_event(rng, u=1.0, scale=3.0) -> group5.Event5:
    return group5.Event5(scale * rng.standard_normal(3), scale * rng.standard_normal(), scale * rng.standard_normal(), u)


def random_trajectory(rng, u: float = 1.0) -> geometry5.FrameTrajectory:
    """A rotation with cubic angle about a random axis, then a cubic translation."""
    axis = rng.standard_normal(3)
    angle = 0.4 * rng.standard_normal(4)
    rot = geometry5.RotatingFrame(axis, angle, u=u)
    trans = geometry5.PolyTranslation(0.4 * rng.standard_normal((4, 3)), u=u)
    return geometry5.Composite(rot, trans, u=u)


# ---------------------------------------------------------------------------
# finite-difference oracles for the frame geometry


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(3)


class _StencilMap:
    """Forward/inverse G5' maps on a stencil whose times are t0 + k h / u.

    Only differences of the x5 integral enter derivatives of the maps, so the
    integral is measured from t0, accumulated over the stencil intervals with a
    3-node Gauss-Legendre rule (error ~h^7 on intervals of length h / u).
    """

    def __init__(self, tr, t0, h):
        self.tr, self.t0, self.h = tr, t0, h
        self._cache = {}

    def _data(self, k):
        if k not in self._cache:
            tr = self.tr
            t = self.t0 + k * self.h / tr.u
            R, At, At1 = self._frame(t)
            A = R @ At
            K = 0.0
            if k:
                prev = self._data(k - 1 if k > 0 else k + 1)
                K = prev[5] + self._interval(prev[0], t)
            self._cache[k] = (t, R, A, At, At1, K)
        return self._cache[k]

    def _frame(self, t):
        """R, Ã = R^T A and dÃ/dt from the raw trajectory derivatives."""
        R, R1 = self.tr.rotation_derivs(t)[:2]
        A, A1 = self.tr.translation_derivs(t)[:2]
        return R, R.T @ A, R1.T @ A + R.T @ A1

    def _interval(self, a, b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        total = 0.0
        for x, w in zip(_GL_NODES, _GL_WEIGHTS):
            v = self._frame(mid + half * x)[2]
            total += w * float(v @ v)
        return half * total

    def apply(self, base, steps, forward):
        """Map base + steps * h; ``steps`` holds integer offsets (N, 5)."""
        u = self.tr.u
        X = base + steps * self.h
        out = np.empty_like(X)
        ks = steps[:, 3].astype(int)
        for k in np.unique(ks):
            sel = ks == k
            t, R, A, At, At1, K = self._data(int(k))
            rows = X[sel]
            if forward:
                x = rows[:, :3]
                out[sel, :3] = x @ R.T + A
                out[sel, 4] = rows[:, 4] + (x @ At1 + At @ At1 - 0.5 * K) / u
            else:
                x = (rows[:, :3] - A) @ R
                out[sel, :3] = x
                out[sel, 4] = rows[:, 4] - (x @ At1 + At @ At1 - 0.5 * K) / u
            out[sel, 3] = t * u
        return out


_D1 = {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}
FD_STEP = 1e-4


def fd_geometry(tr, xp, t, x5=0.3, h=FD_STEP):
    """Jacobian J = dx'/dx and oracle connection from fourth-order differences.

    Gamma'^lam_{mu nu} = J^lam_a d^2 x^a / dx'^mu dx'^nu, the transformation
    law of a connection that vanishes in the inertial frame.
    """
    u = tr.u
    X = np.concatenate([geometry5._as3(xp), [t * u, x5]])
    inv_map = _StencilMap(tr, t, h)
    x0 = inv_map.apply(X, np.zeros((1, 5)), False)[0]
    idx = np.array(list(_D1))
    w = np.array(list(_D1.values()))

    steps = np.zeros((5, 4, 5))
    for a in range(5):
        steps[a, :, a] = idx
    # x0 shares the time of X, so one stencil map serves both directions
    fwd = inv_map.apply(x0, steps.reshape(-1, 5), True).reshape(5, 4, 5)
    J = np.einsum("k,akl->la", w, fwd) / h

    steps = np.zeros((5, 5, 4, 4, 5))
    for mu in range(5):
        for nu in range(5):
            steps[mu, nu, :, :, mu] += idx[:, None]
            steps[mu, nu, :, :, nu] += idx[None, :]
    inv = inv_map.apply(X, steps.reshape(-1, 5), False).reshape(5, 5, 4, 4, 5)
    H = np.einsum("i,j,mnija->amn", w, w, inv) / h**2
    return J, np.einsum("la,amn->lmn", J, H)


# ---------------------------------------------------------------------------
# group5


def check_group_invariance(rng, n=1000):
    def run():
        err = 0.0
        eta = group5.metric()
        for _ in range(n):
            L = group5.matrix5(group5.Boost5.random(rng))
            err = max(err, np.max(np.abs(L.T @ eta @ L - eta)))
        return err

    return _timed(f"group5: Lambda^T eta Lambda = eta ({n} random)", 1e-12, run)


def check_group_closure(rng, n=1000):
    def run():
        err = 0.0
        for _ in range(n):
            b1, b2 = group5.Boost5.random(rng), group5.Boost5.random(rng)
            M = group5.matrix5(group5.compose(b1, b2))
            err = max(err, np.max(np.abs(M - group5.matrix5(b1) @ group5.matrix5(b2))))
        return err

    return _timed(f"group5: composition closure ({n} random)", 1e-12, run)


def check_quadratic_form(rng, n=1000):
    def run():
        err = 0.0
        for _ in range(n):
            b, e = group5.Boost5.random(rng), random_event(rng)
            q0 = group5.quadratic_form(e)
            q1 = group5.quadratic_form(group5.apply_g5(b, e))
            err = max(err, abs(q1 - q0) / max(1.0, abs(q0)))
        return err

    return _timed(f"group5: quadratic form invariance ({n} random)", 1e-10, run)


def check_phase_cocycle(rng, n=200):
    def run():
        err = 0.0
        for _ in range(n):
            b1, b2 = group5.Boost5.random(rng), group5.Boost5.random(rng)
            x, t = rng.standard_normal(3), rng.standard_normal()
            x1 = group5.apply_g5(b2, group5.Event5.from_ts(x, t)).x
            f = group5.boost_phase(group5.compose(b1, b2), x, t)
            err = max(err, abs(f - group5.boost_phase(b1, x1, t) - group5.boost_phase(b2, x, t)))
        return err

    return _timed(f"group5: phase cocycle ({n} random)", 1e-10, run)


# ---------------------------------------------------------------------------
# geometry5


def check_g5p_reduction(rng, n=100):
    def run():
        err = 0.0
        for _ in range(n):
            v = 2.0 * rng.standard_normal(3)
            e = random_event(rng)
            tr = geometry5.Boost(v)
            a = geometry5.apply_g5p(tr, e).as_array()
            b = group5.apply_g5(group5.Boost5(np.eye(3), v), e).as_array()
            err = max(err, np.max(np.abs(a - b)))
        return err

    return _timed(f"geometry5: G5' with A = -vt reduces to G5 ({n} random)", 1e-12, run)


def _geometry_samples(rng, ntraj, npts):
    for _ in range(ntraj):
        tr = random_trajectory(rng)
        for _ in range(npts):
            yield tr, rng.uniform(-2.0, 2.0, 3), rng.uniform(-1.0, 1.0)


def check_geometry_identities(rng, ntraj=20, npts=50, fd=True):
    """Trace identity, fuenfbein identity (both gauges) and the connection oracle."""
    t0 = time.perf_counter()
    trace = vierbein = conn = 0.0
    for tr, xp, t in _geometry_samples(rng, ntraj, npts):
        g = geometry5.metric(tr, xp, t)
        G = geometry5.connection(tr, xp, t)
        trace = max(trace, np.max(np.abs(np.einsum("mn,lmn->l", g, G))))
        eta = group5.metric()
        for gauge, Rt in ((geometry5.Gauge.JACOBIAN, None), (geometry5.Gauge.ROTATED, tr)):
            h = geometry5.funfbein(tr, xp, t, gauge, Rt)
            vierbein = max(vierbein, np.max(np.abs(h @ eta @ h.T - g)))
        if fd:
            _, Gfd = fd_geometry(tr, xp, t)
            conn = max(conn, np.max(np.abs(G - Gfd)))
    dt = time.perf_counter() - t0
    out = [
        CheckResult("geometry5: g'^{mu nu} Gamma'^lam_{mu nu} = 0", trace, 1e-10, dt),
        CheckResult("geometry5: h eta h^T = g' (both gauges)", vierbein, 1e-10, dt),
    ]
    if fd:
        out.append(CheckResult("geometry5: connection vs finite-difference oracle", conn, 1e-6, dt))
    return out


def check_metric_jacobian(rng, ntraj=5, npts=10):
    def run():
        err = 0.0
        eta = group5.metric()
        for tr, xp, t in _geometry_samples(rng, ntraj, npts):
            J, _ = fd_geometry(tr, xp, t)
            err = max(err, np.max(np.abs(J @ eta @ J.T - geometry5.metric(tr, xp, t))))
        return err

    return _timed("geometry5: metric vs J eta J^T", 1e-6, run)


def check_gauge1_spin_connection(rng, ntraj=5, npts=10):
    def run():
        err = 0.0
        for tr, xp, t in _geometry_samples(rng, ntraj, npts):
            err = max(err, np.max(np.abs(geometry5.spin_connection(tr, xp, t))))
        return err

    return _timed("geometry5: spin connection vanishes in gauge 1", 1e-12, run)


# ---------------------------------------------------------------------------
# clifford


def check_anticommutators():
    return _timed("clifford: 15 anticommutators", 1e-15, lambda: np.max(clifford.anticommutator_errors(clifford.standard_rep())))


def check_commutant():
    return _timed("clifford: commutant dimension 1", 0.5, lambda: abs(clifford.commutant_dimension(clifford.standard_rep()) - 1))


def check_intertwining(rng, n=200):
    rep = clifford.standard_rep()

    def run():
        err = 0.0
        for _ in range(n):
            b = group5.Boost5.random(rng)
            err = max(err, clifford.intertwining_residual(b, clifford.boost_rep(b, rep), rep))
        return err

    return _timed(f"clifford: boost_rep intertwining ({n} random)", 1e-12, run)


def random_localized_field(rng, grid: Grid, ncomp=2, width=1.5, modes=3):
    """Random low-mode field under a Gaussian envelope, negligible at the box edge."""
    env = np.exp(-np.sum(grid.coords**2, axis=0) / (4 * width**2))
    return random_smooth_field(rng, grid, ncomp, modes, kmax=2) * env


def random_smooth_field(rng, grid: Grid, ncomp=2, modes=6, kmax=4):
    """Band-limited random field with a few low Fourier modes per axis."""
    out = np.zeros((ncomp,) + grid.shape, dtype=complex)
    x = grid.coords
    for c in range(ncomp):
        for _ in range(modes):
            k = np.zeros(3)
            for a in range(grid.dims):
                k[a] = 2 * np.pi / grid.lengths[a] * rng.integers(-kmax, kmax + 1)
            amp = rng.standard_normal() + 1j * rng.standard_normal()
            out[c] += amp * np.exp(1j * np.tensordot(k, x, axes=(0, 0)))
    return out


def check_levy_leblond(rng, n=50, points=256, m=1.0, u=1.0, hbar=1.0):
    grid = Grid((points,), (2 * np.pi * 4,))

    def run():
        err = 0.0
        for _ in range(n):
            psi1 = random_smooth_field(rng, grid)
            psi2 = clifford.eliminate_lower(psi1, grid, m, u, hbar)
            rate = clifford.schrodinger_rate(psi1, grid, m, hbar)
            r = clifford.dirac_residual(psi1, psi2, grid, m, u, hbar, upper_t=rate)
            err = max(err, np.max(np.abs(r)) / np.max(np.abs(psi1)))
        return err

    return _timed(f"clifford: Levy-Leblond reduction residual ({n} random)", 1e-10, run)


def check_g_factor_identity(rng, n=100, B=(0.3, -0.2, 0.7), m=1.3, charge=0.8, c=1.7, hbar=1.1):
    """pauli_from_coupling minus the spin-free operator equals -(e hbar / 2 m c) sigma.B."""
    # the symmetric gauge A = B x r / 2 is not periodic, so test fields are localized
    grid = Grid((64, 64, 64), (32.0,) * 3)
    B = np.asarray(B, dtype=float)
    em = uniform_magnetic_field(B, charge, c)
    H = clifford.pauli_from_coupling(em, m, hbar, grid=grid)
    A = em.vector(grid)
    q = charge / c

    def spin_free(psi):
        out = np.zeros_like(psi)
        for a in range(3):
            Pi = -1j * hbar * grid.derivative(psi, a) - q * A[a] * psi
            out += -1j * hbar * grid.derivative(Pi, a) - q * A[a] * Pi
        return out / (2 * m)

    zeeman = -(charge * hbar / (2 * m * c)) * np.einsum("i,iab->ab", B, clifford.SIGMA)

    def run():
        err = 0.0
        for _ in range(n):
            psi = random_localized_field(rng, grid)
            diff = H(psi) - spin_free(psi)
            ref = np.einsum("ab,b...->a...", zeeman, psi)
            err = max(err, np.max(np.abs(diff - ref)) / np.max(np.abs(ref)))
        return err

    return _timed(f"clifford: g = 2 operator identity ({n} random)", 1e-8, run)


# ---------------------------------------------------------------------------


def run_suite(seed: int = 0, quick: bool = False) -> list[CheckResult]:
    """All invariant checks for group5, geometry5 and clifford."""
    rng = np.random.default_rng(seed)
    results = [
        check_group_invariance(rng),
        check_group_closure(rng),
        check_quadratic_form(rng),
        check_phase_cocycle(rng),
        check_g5p_reduction(rng),
    ]
    results += check_geometry_identities(rng, *((4, 10) if quick else (20, 50)))
    results += [
        check_metric_jacobian(rng),
        check_gauge1_spin_connection(rng),
        check_anticommutators(),
        check_commutant(),
        check_intertwining(rng),
        check_levy_leblond(rng, n=10 if quick else 50),
        check_g_factor_identity(rng, n=10 if quick else 100),
    ]
    return results

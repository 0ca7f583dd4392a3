"""Acceptance criteria 1-13, each with pinned tolerances and a printed verdict."""
import time

import numpy as np
import pytest

from g5qm import checks, clifford, covariance, geometry5
from g5qm.dynamics import solver
from g5qm.dynamics.grid import Grid
from g5qm.dynamics.states import FreeGaussian, make_gaussian, make_plane_wave
from g5qm.dynamics.terms import HamiltonianSpec, Kinetic, em_coupling, h_spin, uniform_magnetic_field


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_01_group_invariance(rng, record_criterion):
    (inv, clos), dt = _timed(lambda: (checks.check_group_invariance(rng, 1000), checks.check_group_closure(rng, 1000)))
    ok = inv.value < 1e-12 and clos.value < 1e-12 and dt < 1.0
    record_criterion(1, "group invariance", ok,
                     f"max|L^T eta L - eta| = {inv.value:.2e}, closure {clos.value:.2e} (< 1e-12), {dt:.2f}s (< 1s)")
    assert ok


def test_criterion_02_g5p_reduction(rng, record_criterion):
    r = checks.check_g5p_reduction(rng, 100)
    record_criterion(2, "G5' reduction to G5", r.passed, f"max error {r.value:.2e} (< 1e-12)")
    assert r.passed


def test_criterion_03_geometry_identities(rng, record_criterion):
    res, dt = _timed(lambda: checks.check_geometry_identities(rng, 20, 50))
    trace, vier, conn = (r.value for r in res)
    ok = trace < 1e-10 and vier < 1e-10 and conn < 1e-6 and dt < 10.0
    record_criterion(3, "geometry identities", ok,
                     f"trace {trace:.2e}, h eta h^T {vier:.2e} (< 1e-10), connection vs FD {conn:.2e} (< 1e-6), {dt:.2f}s (< 10s)")
    assert ok


def test_criterion_04_clifford_suite(rng, record_criterion):
    def run():
        return checks.check_anticommutators(), checks.check_commutant(), checks.check_intertwining(rng, 200)

    (anti, comm, inter), dt = _timed(run)
    dim = clifford.commutant_dimension(clifford.standard_rep())
    ok = anti.value < 1e-15 and dim == 1 and inter.value < 1e-12 and dt < 5.0
    record_criterion(4, "Clifford suite", ok,
                     f"anticommutators {anti.value:.2e} (< 1e-15), commutant dim {dim}, intertwining {inter.value:.2e} (< 1e-12), {dt:.2f}s (< 5s)")
    assert ok


def test_criterion_05_levy_leblond(rng, record_criterion):
    r = checks.check_levy_leblond(rng, 50, 256)
    record_criterion(5, "Levy-Leblond reduction", r.passed, f"max relative residual {r.value:.2e} (< 1e-10)")
    assert r.passed


def test_criterion_06_free_dynamics(record_criterion):
    def run():
        grid = Grid((1024,), (80.0,))
        H = HamiltonianSpec([Kinetic(1.0)])
        phase_err = 0.0
        for n in (1, 7, -20, 100):
            p = 2 * np.pi / 80.0 * n
            pw = make_plane_wave(grid, [p])
            dt = 0.05
            out = solver.step(pw, H, dt)
            phase_err = max(phase_err, np.max(np.abs(out.psi - pw.psi * np.exp(-1j * p**2 / 2 * dt))) * np.sqrt(80.0))
        psi0 = make_gaussian(grid, 0.0, 0.5, 1.0)
        ref = FreeGaussian(0.0, 0.5, 1.0, dims=1)
        _, recs = solver.evolve(psi0, H, t1=5.0, nsteps=500, stride=10)
        width_err = max(abs(np.sqrt(r.var_x) / ref.width_at(r.t) - 1) for r in recs)
        return phase_err, width_err

    (phase_err, width_err), dt = _timed(run)
    ok = phase_err < 1e-12 and width_err < 1e-8 and dt < 5.0
    record_criterion(6, "free dynamics", ok,
                     f"plane-wave phase {phase_err:.2e} (< 1e-12), Gaussian width rel {width_err:.2e} (< 1e-8), {dt:.2f}s (< 5s)")
    assert ok


def test_criterion_07_boost_covariance(record_criterion):
    def run():
        grid = Grid((1024,), (60.0,))
        psi0 = make_gaussian(grid, -3.0, 0.8, 1.0)
        return covariance.covariance_residual(geometry5.Boost([0.6, 0, 0]), psi0, 2.0, 400).report

    rep, dt = _timed(run)
    ok = rep.l2_distance < 1e-10 and dt < 10.0
    record_criterion(7, "boost covariance", ok, f"L2 {rep.l2_distance:.2e} (< 1e-10), {dt:.2f}s (< 10s)")
    assert ok


def _accel_run(nsteps, u=1.0):
    grid = Grid((1024,), (40.0,))
    psi0 = make_gaussian(grid, 0.0, 0.0, 1.0)
    return covariance.covariance_residual(geometry5.Accel([1.0, 0, 0], u=u), psi0, 1.0, nsteps)


@pytest.fixture(scope="module")
def accel_runs():
    t0 = time.perf_counter()
    fine = _accel_run(4096)
    dt = time.perf_counter() - t0
    coarse = _accel_run(2048)
    return fine, coarse, dt


def test_criterion_08_accelerated_frame(accel_runs, record_criterion):
    fine, coarse, dt = accel_runs
    l2 = fine.report.l2_distance
    ratio = coarse.report.l2_distance / l2
    ok = l2 < 1e-6 and ratio >= 3.9 and dt < 30.0
    record_criterion(8, "accelerated-frame covariance", ok,
                     f"L2 {l2:.2e} (< 1e-6), dt-halving ratio {ratio:.3f} (>= 3.9), {dt:.2f}s (< 30s)")
    assert ok


def test_criterion_09_rotating_frame(record_criterion):
    def run():
        grid = Grid((256, 256), (32.0, 32.0))
        center, mom, width = [3.0, 1.0], [0.3, 0.2], 1.2
        psi0 = make_gaussian(grid, center, mom, width)
        packet = FreeGaussian(center, mom, width, dims=2)
        norm = 1 / np.sqrt(np.sum(np.abs(packet(grid.coords, 0.0)) ** 2) * grid.cell_volume)
        exact = lambda x, t: norm * packet(x, t)
        return covariance.covariance_residual(geometry5.Rotate([0, 0, 1], 0.5), psi0, 1.0, 200, analytic=exact).report

    rep, dt = _timed(run)
    ok = rep.l2_distance < 1e-5 and dt < 120.0
    record_criterion(9, "rotating-frame covariance", ok, f"L2 {rep.l2_distance:.2e} (< 1e-5), {dt:.2f}s (< 120s)")
    assert ok


def test_criterion_10_equivalence_principle(record_criterion):
    gs = [np.array([0.0, 0.0, -1.0]), np.array([0.5, 0.3, -1.0]), np.array([-0.4, 0.0, 0.8])]
    as_ = [np.zeros(3), np.array([0.0, 0.0, -1.0]), np.array([1.0, -0.5, 0.2])]

    def run():
        grid = Grid((64, 64, 64), (40.0,) * 3)
        psi0 = make_gaussian(grid, 0.0, 0.0, 1.5)
        slope_err, dens = 0.0, []
        for g in gs:
            for a in as_:
                r = covariance.equivalence_principle_run(g, a, psi0, 1.0, 20)
                slope_err = max(slope_err, r.slope_error)
                if r.density_vs_free is not None:
                    dens.append(r.density_vs_free)
        return slope_err, dens

    (slope_err, dens), dt = _timed(run)
    ok = slope_err < 1e-8 and len(dens) == 1 and max(dens) < 1e-8 and dt < 60.0
    record_criterion(10, "equivalence principle", ok,
                     f"slope error {slope_err:.2e} (< 1e-8) over 3x3 (g, a), a = g density diff {max(dens):.2e} (< 1e-8), {dt:.2f}s (< 60s)")
    assert ok


def test_criterion_11_g_factor(rng, record_criterion):
    def run():
        ident = checks.check_g_factor_identity(rng, 100)
        B, e, m, c = np.array([0.0, 0.0, 2.0]), 1.0, 1.0, 1.0
        em = uniform_magnetic_field(B, e, c)
        grid = Grid((64, 64), (20.0, 20.0))
        psi0 = make_gaussian(grid, 0.0, 0.0, 1.0, spin=[1.0, 1.0])
        fit, _ = covariance.larmor_run(em_coupling(em, m, 1.0, spinor=True), psi0, 3.0, 300)
        return ident, fit, e * 2.0 / (m * c)

    (ident, fit, larmor), dt = _timed(run)
    rel = abs(fit.frequency - larmor) / larmor
    ok = ident.value < 1e-8 and rel < 1e-6 and dt < 60.0
    record_criterion(11, "g = 2", ok,
                     f"operator identity {ident.value:.2e} (< 1e-8), Larmor rel {rel:.2e} (< 1e-6), {dt:.2f}s (< 60s)")
    assert ok


def test_criterion_12_spin_inertial_term(record_criterion):
    omegas = [np.array([0.0, 0.0, 0.7]), np.array([0.5, 0.0, 0.5]), np.array([-0.3, 0.8, 0.2])]
    hbar = 1.0
    norm_err = axis_err = freq_err = 0.0
    grid = Grid((4,), (8.0,))
    psi0 = make_gaussian(grid, 0.0, 0.0, 1.0, spin=[1.0, 0.3])
    for w in omegas:
        wn = np.linalg.norm(w)
        tr = geometry5.Rotate(w, wn)
        M = h_spin(tr, 0.37, hbar)
        norm_err = max(norm_err, abs(np.linalg.norm(M, 2) - hbar * wn / 2))
        fit, _ = covariance.spin_frame_run(w, psi0, 5.0, 200)
        # spins at rest in inertial space counter-rotate in the spinning frame
        axis_err = max(axis_err, np.max(np.abs(fit.axis + w / wn)))
        freq_err = max(freq_err, abs(fit.frequency - wn) / wn)
    ok = norm_err < 1e-14 and axis_err < 1e-8 and freq_err < 1e-8
    record_criterion(12, "spin inertial term", ok,
                     f"| ||h_spin|| - hbar|w|/2 | {norm_err:.2e}, axis {axis_err:.2e}, frequency rel {freq_err:.2e} (< 1e-8)")
    assert ok


def test_criterion_13_u_independence(accel_runs, record_criterion):
    fine = accel_runs[0]
    other = _accel_run(4096, u=3.0)
    diff = float(np.max(np.abs(other.state_b.density() - fine.state_b.density())))
    ok = diff < 1e-10
    record_criterion(13, "u-independence", ok, f"max density difference u=3 vs u=1 {diff:.2e} (< 1e-10)")
    assert ok

import numpy as np
import pytest

from g5qm import covariance, geometry5
from g5qm.covariance import FrameMap, compare, transform_state
from g5qm.dynamics.grid import Grid
from g5qm.dynamics.states import FreeGaussian, make_gaussian, make_plane_wave


@pytest.fixture(scope="module")
def grid1():
    return Grid((512,), (40.0,))


def test_compare_identical(grid1):
    s = make_gaussian(grid1, 1.0, 0.5, 1.0)
    rep = compare(s, s)
    assert rep.l2_distance == 0.0 and rep.fidelity == pytest.approx(1.0) and rep.max_density_diff == 0.0
    assert set(rep.as_dict()) == {"l2_distance", "fidelity", "max_density_diff"}


def test_compare_rejects_grid_mismatch(grid1):
    with pytest.raises(ValueError):
        compare(make_gaussian(grid1), make_gaussian(Grid((256,), (40.0,))))


def test_identity_map(grid1):
    s = make_gaussian(grid1, -1.0, 0.2, 1.0)
    out = transform_state(FrameMap(geometry5.Inertial()), s)
    assert np.max(np.abs(out.psi - s.psi)) < 1e-15


@pytest.mark.parametrize(
    "tr",
    [geometry5.Boost([0.4, 0, 0]), geometry5.Accel([1.0, 0, 0]), geometry5.PolyTranslation([[0.5, 0, 0], [0.1, 0, 0], [0, 0, 0], [0.05, 0, 0]])],
)
def test_round_trip(grid1, tr):
    s = make_gaussian(grid1, 0.5, 0.3, 1.0, t=0.8)
    fmap = FrameMap(tr)
    back = transform_state(fmap.inverse(), transform_state(fmap, s))
    assert compare(back, s).l2_distance < 1e-12


def test_boost_maps_plane_wave(grid1):
    m = 1.0
    v = 2 * np.pi / 40.0 * 3
    p = 2 * np.pi / 40.0 * 5
    pw = make_plane_wave(grid1, [p], m=m)
    out = transform_state(FrameMap(geometry5.Boost([v, 0, 0])), pw)  # t = 0
    target = make_plane_wave(grid1, [p - m * v], m=m)
    assert compare(out, target).l2_distance < 1e-12


def test_accel_phase_trivial_at_t0(grid1):
    s = make_gaussian(grid1, 0.0, 0.4, 1.0)
    out = transform_state(FrameMap(geometry5.Accel([2.0, 0, 0])), s)
    assert np.allclose(out.psi, s.psi, atol=1e-15)


def test_rotation_needs_analytic():
    g = Grid((32, 32), (10.0, 10.0))
    s = make_gaussian(g, 0.0, 0.0, 1.0, t=1.0)
    fmap = FrameMap(geometry5.Rotate([0, 0, 1], 0.5))
    with pytest.raises(ValueError, match="analytic"):
        transform_state(fmap, s)
    out = transform_state(fmap, s, resample_rotations=True)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)


def test_rotation_with_analytic_matches_resampling():
    g = Grid((128, 128), (24.0, 24.0))
    packet = FreeGaussian([2.0, 1.0], [0.0, 0.0], 1.0, dims=2)
    norm = 1 / np.sqrt(np.sum(np.abs(packet(g.coords, 0.0)) ** 2) * g.cell_volume)
    exact = lambda x, t: norm * packet(x, t)
    t = 1.0
    s = make_gaussian(g, [2.0, 1.0], 0.0, 1.0).with_components(exact(g.coords, t)[None], t=t)
    fmap = FrameMap(geometry5.Rotate([0, 0, 1], 0.7))
    a = transform_state(fmap, s, resample_rotations=True)
    b = transform_state(fmap, s, analytic=exact)
    # resampling sees the periodic images of the spreading tails
    assert compare(a, b).l2_distance < 1e-6


def test_inertial_residual(grid1):
    s = make_gaussian(grid1, 0.0, 0.5, 1.0)
    res = covariance.covariance_residual(geometry5.Inertial(), s, 1.0, 50)
    assert res.report.l2_distance < 1e-12


def test_boost_residual_is_tiny(grid1):
    s = make_gaussian(grid1, -2.0, 0.0, 1.0)
    res = covariance.covariance_residual(geometry5.Boost([0.5, 0, 0]), s, 1.0, 20, stride=10)
    assert res.report.l2_distance < 1e-10
    assert len(res.series_a) == len(res.series_b) == 3


def test_coarse_steps_show_splitting_error():
    # a cubic A(t) makes the inertial force time dependent, so Strang error appears
    g = Grid((512,), (40.0,))
    s = make_gaussian(g, 0.0, 0.0, 1.0)
    tr = geometry5.PolyTranslation([[0, 0, 0], [0, 0, 0], [0, 0, 0], [1.0, 0, 0]])
    coarse = covariance.covariance_residual(tr, s, 1.0, 4).report.l2_distance
    fine = covariance.covariance_residual(tr, s, 1.0, 64).report.l2_distance
    assert coarse > 1e-4 and fine < coarse / 100


@pytest.mark.parametrize("middle", [0.8, 1.0])
def test_fit_slope_linear(middle):
    t = np.linspace(0, 1, 21)
    y = np.stack([3 * t + 1, -2 * t], axis=1)
    slope, resid = covariance.fit_slope(t, y, middle)
    assert np.allclose(slope, [3, -2]) and resid < 1e-13


def test_equivalence_single_case():
    g = Grid((32, 32, 32), (30.0,))
    s = make_gaussian(g, 0.0, 0.0, 1.5)
    rep = covariance.equivalence_principle_run([0, 0, -1.0], [0, 0, -1.0], s, 0.5, 10)
    assert rep.slope_error < 1e-8 and rep.density_vs_free < 1e-8
    other = covariance.equivalence_principle_run([0, 0, -1.0], [0, 0, 0.0], s, 0.5, 10)
    assert other.density_vs_free is None and other.slope_error < 1e-8


def test_precession_fit_synthetic():
    t = np.linspace(0, 3, 61)
    w = 1.3
    spin = np.stack([np.cos(w * t), np.sin(w * t), 0.0 * t], axis=1) * 0.6 + [0, 0, 0.8]
    fit = covariance.precession_fit(t, spin)
    assert np.allclose(fit.axis, [0, 0, 1], atol=1e-12)
    assert fit.frequency == pytest.approx(w, rel=1e-12)
    back = covariance.precession_fit(t, spin * [1, -1, 1])
    assert np.allclose(back.axis, [0, 0, -1], atol=1e-12)


def test_spin_frame_run_counter_rotates():
    g = Grid((4,), (8.0,))
    s = make_gaussian(g, spin=[1.0, 0.2])
    fit, final = covariance.spin_frame_run([0, 0, 0.9], s, 4.0, 100)
    assert np.allclose(fit.axis, [0, 0, -1], atol=1e-10)
    assert fit.frequency == pytest.approx(0.9, rel=1e-10)
    assert final.norm() == pytest.approx(s.norm())

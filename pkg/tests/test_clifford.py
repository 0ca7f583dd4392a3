import numpy as np
import pytest

from g5qm import clifford
from g5qm.dynamics.grid import Grid
from g5qm.dynamics.terms import EMPotentials
from g5qm.group5 import Boost5, onshell_energy


@pytest.fixture(scope="module")
def rep():
    return clifford.standard_rep()


def test_block_structure(rep):
    for i in range(3):
        assert np.array_equal(rep.block(i, 0, 0), clifford.SIGMA[i])
        assert np.array_equal(rep.block(i, 1, 1), -clifford.SIGMA[i])
        assert not np.any(rep.block(i, 0, 1)) and not np.any(rep.block(i, 1, 0))
    assert rep.c * rep.d == pytest.approx(-2.0)
    for mu in (3, 4):
        assert not np.any(rep.gamma[mu] @ rep.gamma[mu])


def test_rep_rejects_bad_constants():
    with pytest.raises(ValueError):
        clifford.standard_rep(1.0, 1.0)


@pytest.mark.parametrize("c", [np.sqrt(2.0), 1.0, -4.0])
def test_anticommutators(c):
    rep = clifford.standard_rep(c, -2.0 / c)
    assert np.max(clifford.anticommutator_errors(rep)) < 1e-15
    assert clifford.commutant_dimension(rep) == 1


def test_identity_boost_rep(rep):
    T = clifford.boost_rep(Boost5.identity(), rep)
    assert np.allclose(T, np.eye(4), atol=1e-15)


def test_rotation_rep_is_spinorial(rep):
    from scipy.spatial.transform import Rotation

    R = Rotation.from_rotvec([0, 0, np.pi / 2]).as_matrix()
    T = clifford.boost_rep(Boost5(R, [0, 0, 0]), rep)
    expected = np.kron(np.eye(2), np.diag(np.exp([-1j * np.pi / 4, 1j * np.pi / 4])))
    assert np.allclose(T, expected, atol=1e-14)


def test_pure_boost_rep_is_unipotent(rep):
    T = clifford.boost_rep(Boost5(np.eye(3), [0.3, -0.4, 1.2]), rep)
    N = T - np.eye(4)
    assert np.max(np.abs(N @ N)) < 1e-14
    assert np.max(np.abs(N[:2, :])) < 1e-15  # only the lower-left block is non-zero


def test_intertwining(rng, rep):
    for _ in range(20):
        b = Boost5.random(rng, u=rng.uniform(0.5, 2))
        T = clifford.boost_rep(b, rep)
        assert clifford.intertwining_residual(b, T, rep) < 1e-12
        assert abs(np.linalg.det(T) - 1) < 1e-12


def test_eliminate_lower_plane_wave(rep):
    grid = Grid((32,), (2 * np.pi,))
    p = 3.0
    psi1 = np.stack([np.exp(1j * p * grid.axes[0]), np.zeros(32)])
    psi2 = clifford.eliminate_lower(psi1, grid, m=1.5, rep=rep)
    expected = p / (1.5 * rep.d) * (clifford.SIGMA[0] @ psi1)
    assert np.allclose(psi2, expected, atol=1e-12)


def test_eliminate_lower_constant(rep):
    grid = Grid((16, 16), (4.0, 4.0))
    psi1 = np.ones((2, 16, 16), dtype=complex)
    assert np.max(np.abs(clifford.eliminate_lower(psi1, grid, 1.0, rep=rep))) < 1e-14


@pytest.mark.parametrize("m, u, hbar", [(1.0, 1.0, 1.0), (2.0, 3.0, 0.7)])
def test_dirac_residual_plane_wave(rep, m, u, hbar):
    grid = Grid((64,), (2 * np.pi,))
    p = 4 * hbar
    E = onshell_energy([p, 0, 0], m)
    psi1 = np.stack([np.exp(1j * p * grid.axes[0] / hbar), np.zeros(64)]) * (1 + 0.5j)
    psi1_t = -1j * E / hbar * psi1
    psi2 = clifford.eliminate_lower(psi1, grid, m, u, hbar, rep)
    r = clifford.dirac_residual(psi1, psi2, grid, m, u, hbar, rep, upper_t=psi1_t)
    assert np.max(np.abs(r)) < 1e-12


def test_dirac_residual_zero_spinor(rep):
    grid = Grid((8,), (1.0,))
    z = np.zeros((2, 8))
    assert not np.any(clifford.dirac_residual(z, z, grid, 1.0, rep=rep))


def test_dirac_residual_shape_check(rep):
    grid = Grid((8,), (1.0,))
    with pytest.raises(ValueError):
        clifford.dirac_residual(np.zeros((2, 8)), np.zeros((2, 4)), grid, 1.0, rep=rep)


def test_pauli_from_coupling_scalar_potential(rep):
    grid = Grid((32,), (2 * np.pi,))
    V0 = 0.25
    em = EMPotentials(scalar_fn=lambda x, t: V0 + 0.0 * x[0], charge=2.0)
    H = clifford.pauli_from_coupling(em, 1.0, grid=grid, rep=rep)
    psi = np.stack([np.exp(2j * grid.axes[0]), np.zeros(32)])
    assert np.allclose(H(psi), (2.0 + 2.0 * V0) * psi, atol=1e-12)


def test_pauli_needs_grid(rep):
    with pytest.raises(ValueError):
        clifford.pauli_from_coupling(None, 1.0, rep=rep)


@pytest.mark.parametrize("B", [[0, 0, 1.0], [0.3, -0.2, 0.7]])
def test_zeeman_is_g_equal_two(rep, B):
    m, e, c, hbar = 1.3, -0.8, 1.7, 1.1
    Z = clifford.zeeman_matrix(np.array(B), m, e, c, hbar, rep)
    expected = -(e * hbar / (2 * m * c)) * np.einsum("i,iab->ab", B, clifford.SIGMA)
    assert np.allclose(Z, expected, atol=1e-15)


def test_spinor_value():
    s = clifford.SpinorValue(np.array([1, 2]), np.array([3, 4]))
    assert np.array_equal(s.as_array(), [1, 2, 3, 4])

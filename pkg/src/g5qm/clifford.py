"""Gamma matrices for the degenerate five-dimensional metric eta.

The algebra {gamma^mu, gamma^nu} = 2 eta^{mu nu} has a 4x4 irreducible
representation.  In the standard representation used here

    gamma^i = diag(sigma_i, -sigma_i),
    gamma^4 = [[0, 0], [c I, 0]],   gamma^5 = [[0, d I], [0, 0]],   c d = -2,

so gamma^4 and gamma^5 are nilpotent.  With chi = exp(-i m s / hbar) (psi1, psi2)
the upper row of gamma^mu D_mu chi = 0 fixes psi2 in terms of psi1 and the
lower row becomes the Schroedinger (Pauli) equation for psi1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, null_space

from .group5 import ETA, Boost5, matrix5

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class GammaRep:
    """Five 4x4 matrices ``gamma[mu]`` (mu = 0..4 stands for 1..5)."""

    gamma: np.ndarray

    def block(self, mu: int, row: int, col: int) -> np.ndarray:
        g = self.gamma[mu]
        return g[2 * row : 2 * row + 2, 2 * col : 2 * col + 2]

    @property
    def c(self) -> complex:
        """Scalar in the lower-left block of gamma^4."""
        return complex(self.gamma[3][2, 0])

    @property
    def d(self) -> complex:
        """Scalar in the upper-right block of gamma^5."""
        return complex(self.gamma[4][0, 2])

    def slash(self, vec) -> np.ndarray:
        """gamma^mu v_mu for a length-5 vector."""
        return np.tensordot(np.asarray(vec), self.gamma, axes=(0, 0))


@dataclass(frozen=True)
class SpinorValue:
    upper: np.ndarray
    lower: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.upper, self.lower])


def standard_rep(c: float = np.sqrt(2.0), d: float = -np.sqrt(2.0)) -> GammaRep:
    if not np.isclose(c * d, -2.0, rtol=0, atol=1e-15):
        raise ValueError("the gamma^4/gamma^5 constants must satisfy c d = -2")
    g = np.zeros((5, 4, 4), dtype=complex)
    for i in range(3):
        g[i, :2, :2] = SIGMA[i]
        g[i, 2:, 2:] = -SIGMA[i]
    g[3, 2:, :2] = c * I2
    g[4, :2, 2:] = d * I2
    g.setflags(write=False)
    return GammaRep(g)


def anticommutator_errors(rep: GammaRep) -> np.ndarray:
    """max |{gamma^mu, gamma^nu} - 2 eta^{mu nu}| for each pair, shape (5, 5)."""
    g = rep.gamma
    out = np.zeros((5, 5))
    for mu in range(5):
        for nu in range(5):
            ac = g[mu] @ g[nu] + g[nu] @ g[mu]
            out[mu, nu] = np.max(np.abs(ac - 2 * ETA[mu, nu] * np.eye(4)))
    return out


def commutant_dimension(rep: GammaRep, tol: float = 1e-10) -> int:
    """Dimension of the space of 4x4 matrices commuting with every gamma."""
    n = rep.gamma.shape[1]
    eye = np.eye(n)
    # vec(M g - g M) = (g^T kron I - I kron g) vec(M) in column-major vec
    rows = [np.kron(g.T, eye) - np.kron(eye, g) for g in rep.gamma]
    return null_space(np.vstack(rows), rcond=tol).shape[1]


def spinor_generator(X: np.ndarray, rep: GammaRep) -> np.ndarray:
    """1/4 X_{rho sigma} gamma^rho gamma^sigma for a Lie-algebra element X^mu_nu."""
    Xlow = ETA @ X
    g = rep.gamma
    return 0.25 * np.einsum("rs,rij,sjk->ik", Xlow, g, g)


def _lie_algebra_parts(b: Boost5):
    from scipy.spatial.transform import Rotation

    rotvec = Rotation.from_matrix(b.R).as_rotvec()
    Xr = np.zeros((5, 5))
    K = np.array(
        [[0.0, -rotvec[2], rotvec[1]], [rotvec[2], 0.0, -rotvec[0]], [-rotvec[1], rotvec[0], 0.0]]
    )
    Xr[:3, :3] = K
    Xb = np.zeros((5, 5))
    Xb[:3, 3] = -b.v / b.u
    Xb[4, :3] = -b.v / b.u
    return Xb, Xr


def boost_rep(b: Boost5, rep: GammaRep | None = None) -> np.ndarray:
    """Spinor matrix T with T^-1 gamma^mu T = Lambda^mu_nu gamma^nu and det T = 1.

    Lambda factors as (pure velocity) x (rotation); each factor is the
    exponential of a generator, and so is T.
    """
    rep = standard_rep() if rep is None else rep
    Xb, Xr = _lie_algebra_parts(b)
    T = expm(spinor_generator(Xb, rep)) @ expm(spinor_generator(Xr, rep))
    det = np.linalg.det(T)
    if abs(det - 1) > 1e-12:
        T = T / det ** (1 / T.shape[0])
    return T


def intertwining_residual(b: Boost5, T: np.ndarray, rep: GammaRep) -> float:
    L = matrix5(b)
    Tinv = np.linalg.inv(T)
    lhs = np.einsum("ij,mjk,kl->mil", Tinv, rep.gamma, T)
    rhs = np.einsum("mn,nik->mik", L, rep.gamma)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# reduction to two components


def _covariant_gradient(psi, grid, em, t, hbar):
    """Spatial D_i psi = d_i psi - (i e / c hbar) A_i psi, shape (3, 2, *grid)."""
    D = np.stack([grid.derivative(psi, a) for a in range(3)])
    if em is not None:
        A = em.vector(grid, t)
        D = D - 1j * em.charge / (em.c * hbar) * A[:, None] * psi[None]
    return D


def _sigma_dot(P, vec):
    """sum_i P_i vec_i where P_i are 2x2 blocks and vec has shape (3, 2, ...)."""
    return np.einsum("iab,ib...->a...", P, vec)


def eliminate_lower(psi1, grid, m: float, u: float = 1.0, hbar: float = 1.0, rep=None, em=None, t=0.0):
    """psi2 = hbar/(i m u d) (P.D) psi1, the solution of the upper row.

    P_i are the upper-left blocks of gamma^i (sigma_i in the standard rep).
    """
    rep = standard_rep() if rep is None else rep
    P = np.stack([rep.block(i, 0, 0) for i in range(3)])
    Dpsi = _covariant_gradient(np.asarray(psi1, dtype=complex), grid, em, t, hbar)
    return hbar / (1j * m * u * rep.d) * _sigma_dot(P, Dpsi)


def schrodinger_rate(psi1, grid, m: float, hbar: float = 1.0) -> np.ndarray:
    """d psi/dt of the free Schroedinger equation, with odd-derivative wavenumbers."""
    lap = sum(grid.derivative(grid.derivative(psi1, a), a) for a in range(grid.dims))
    return 1j * hbar / (2 * m) * lap


def dirac_residual(upper, lower, grid, m, u=1.0, hbar=1.0, rep=None, upper_t=None, em=None, t=0.0):
    """gamma^mu D_mu chi for chi = exp(-i m u x5 / hbar) (upper, lower).

    ``upper_t`` is d(upper)/dt; d5 acts as -i m u / hbar and d4 as (1/u) d/dt.
    With ``em`` the scalar potential enters D_4 through A_4 = -(c/u) A0.
    Returns an array of shape (4, *grid.shape).
    """
    rep = standard_rep() if rep is None else rep
    upper = np.asarray(upper, dtype=complex)
    lower = np.asarray(lower, dtype=complex)
    if upper.shape != lower.shape or upper.shape[1:] != grid.shape:
        raise ValueError("spinor components do not match the grid")
    if upper_t is None:
        upper_t = np.zeros_like(upper)
    chi = np.concatenate([upper, lower])
    Dchi = _covariant_gradient(chi, grid, em, t, hbar)
    chi_t = np.concatenate([upper_t, np.zeros_like(lower)])
    D4 = chi_t / u
    if em is not None:
        A0 = em.scalar(grid, t)
        D4 = D4 + 1j * em.charge / hbar * A0 * chi / u
    D5 = -1j * m * u / hbar * chi
    out = np.einsum("iab,ib...->a...", rep.gamma[:3], Dchi)
    out = out + np.einsum("ab,b...->a...", rep.gamma[3], D4)
    out = out + np.einsum("ab,b...->a...", rep.gamma[4], D5)
    return out


def pauli_from_coupling(em, m, hbar=1.0, rep=None, grid=None, u=1.0, t=0.0):
    """Operator psi1 -> H psi1 obtained by eliminating psi2 from the coupled equation.

    From the two rows,  P.D psi1 + d D5 psi2 = 0  and  c D4 psi1 + Q.D psi2 = 0,
    i hbar d_t psi1 = e A0 psi1 - hbar^2/(m c d) (Q.D)(P.D) psi1.
    No spin term is inserted: sigma.B comes out of (Q.D)(P.D).
    """
    rep = standard_rep() if rep is None else rep
    if grid is None:
        raise ValueError("a grid is required")
    P = np.stack([rep.block(i, 0, 0) for i in range(3)])
    Q = np.stack([rep.block(i, 1, 1) for i in range(3)])
    cd = rep.c * rep.d

    def apply(psi1):
        psi1 = np.asarray(psi1, dtype=complex)
        inner = _sigma_dot(P, _covariant_gradient(psi1, grid, em, t, hbar))
        outer = _sigma_dot(Q, _covariant_gradient(inner, grid, em, t, hbar))
        out = -(hbar**2) / (m * cd) * outer
        if em is not None:
            out = out + em.charge * em.scalar(grid, t) * psi1
        return out

    return apply


def field_strength_coupling(F, m, charge, c, hbar=1.0, rep=None) -> np.ndarray:
    """Spin matrix produced by the antisymmetric part of (Q.D)(P.D).

    ``F`` is the field tensor F_ij = d_i A_j - d_j A_i, shape (3, 3, ...).
    Since [D_i, D_j] = -(i e / c hbar) F_ij, the antisymmetric part contributes
    -hbar^2/(m c d) * 1/2 sum_ij Q_i P_j [D_i, D_j].  Returns shape (2, 2, ...).
    """
    rep = standard_rep() if rep is None else rep
    P = np.stack([rep.block(i, 0, 0) for i in range(3)])
    Q = np.stack([rep.block(i, 1, 1) for i in range(3)])
    QP = np.einsum("iab,jbc->ijac", Q, P)
    K = 0.5 * (QP - QP.transpose(1, 0, 2, 3))
    comm = -1j * charge / (c * hbar) * np.asarray(F)
    prefactor = -(hbar**2) / (m * rep.c * rep.d)
    return prefactor * 0.5 * np.einsum("ijac,ij...->ac...", K, comm)


def magnetic_field_tensor(B) -> np.ndarray:
    """F_ij = eps_ijk B_k for a field ``B`` of shape (3, ...)."""
    B = np.asarray(B)
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    return np.einsum("ijk,k...->ij...", eps, B)


def zeeman_matrix(B, m, charge, c, hbar=1.0, rep=None) -> np.ndarray:
    """Spin coupling for a magnetic field B; equals -(e hbar / 2 m c) sigma.B."""
    return field_strength_coupling(magnetic_field_tensor(B), m, charge, c, hbar, rep)

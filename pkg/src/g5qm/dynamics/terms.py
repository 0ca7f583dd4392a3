"""Hamiltonian terms and the constructors for inertial, spin, Newtonian and EM couplings.

Every term is classified by the basis in which its exponential is cheap:
``POSITION`` (diagonal on the grid), ``MOMENTUM`` (diagonal after an FFT) or
``MIXED`` (rotations, general minimal coupling).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..clifford import SIGMA, field_strength_coupling, magnetic_field_tensor
from ..geometry5 import FrameTrajectory, Inertial, PolyTranslation, RotatingFrame, unskew
from .grid import Grid

POSITION = "position"
MOMENTUM = "momentum"
MIXED = "mixed"

OMEGA_ANTISYM_TOL = 1e-10


def _at(value, t):
    return value(t) if callable(value) else value


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    out = np.zeros(3)
    out[: a.size] = a
    return out


@dataclass
class Kinetic:
    m: float
    kind = MOMENTUM


@dataclass
class LinearPotential:
    """V(x) = w(t) . x; ``w`` is a 3-vector or a callable of t."""

    w: object
    kind = POSITION

    def weight(self, t) -> np.ndarray:
        return _vec3(_at(self.w, t))

    def values(self, grid: Grid, t) -> np.ndarray:
        return np.tensordot(self.weight(t), grid.coords, axes=(0, 0))


@dataclass
class Potential:
    """General scalar potential; ``V`` is an array on the grid or V(coords, t)."""

    V: object
    kind = POSITION

    def values(self, grid: Grid, t) -> np.ndarray:
        if callable(self.V):
            return np.asarray(self.V(grid.coords, t), dtype=float) * np.ones(grid.shape)
        return np.broadcast_to(np.asarray(self.V, dtype=float), grid.shape)


@dataclass
class Rotation:
    """H = -omega(t) . L with L = x cross p (frame spinning at omega)."""

    omega: object
    kind = MIXED

    def vector(self, t) -> np.ndarray:
        return _vec3(_at(self.omega, t))


@dataclass
class SpinMatrix:
    """Spatially uniform Hermitian 2x2 term M(t) (PauliSpinor states only)."""

    M: object
    kind = POSITION

    def matrix(self, t) -> np.ndarray:
        M = np.asarray(_at(self.M, t), dtype=complex)
        if M.shape != (2, 2):
            raise ValueError("spin matrix must be 2x2")
        return M


@dataclass
class SpinField:
    """Position-dependent Hermitian 2x2 term, ``M`` of shape (2, 2, *grid) or M(coords, t)."""

    M: object
    kind = POSITION

    def matrices(self, grid: Grid, t) -> np.ndarray:
        M = self.M(grid.coords, t) if callable(self.M) else self.M
        return np.asarray(M, dtype=complex)


@dataclass
class EMPotentials:
    """External potentials (A_vec, A0) for a particle of charge ``charge``.

    ``vector`` and ``scalar`` map (grid, t) to arrays of shape (3, *grid) and
    grid.shape.  ``uniform_B`` marks the symmetric gauge A = B x r / 2.
    """

    vector_fn: Callable | None = None
    scalar_fn: Callable | None = None
    charge: float = 1.0
    c: float = 1.0
    uniform_B: np.ndarray | None = None

    def vector(self, grid: Grid, t=0.0) -> np.ndarray:
        if self.vector_fn is None:
            return np.zeros((3,) + grid.shape)
        return np.asarray(self.vector_fn(grid.coords, t), dtype=float) * np.ones((3,) + grid.shape)

    def scalar(self, grid: Grid, t=0.0) -> np.ndarray:
        if self.scalar_fn is None:
            return np.zeros(grid.shape)
        return np.asarray(self.scalar_fn(grid.coords, t), dtype=float) * np.ones(grid.shape)

    def magnetic_field(self, grid: Grid, t=0.0) -> np.ndarray:
        """B = curl A evaluated spectrally, shape (3, *grid)."""
        if self.uniform_B is not None:
            return self.uniform_B.reshape((3,) + (1,) * grid.dims) * np.ones((3,) + grid.shape)
        A = self.vector(grid, t)
        d = lambda f, a: np.real(grid.derivative(f, a))
        return np.stack(
            [d(A[2], 1) - d(A[1], 2), d(A[0], 2) - d(A[2], 0), d(A[1], 0) - d(A[0], 1)]
        )


def uniform_magnetic_field(B, charge=1.0, c=1.0, scalar_fn=None) -> EMPotentials:
    B = _vec3(B)

    def vec(x, t):
        return 0.5 * np.cross(B, x, axis=0) if x.ndim > 1 else 0.5 * np.cross(B, x)

    return EMPotentials(vec, scalar_fn, charge, c, uniform_B=B)


@dataclass
class MinimalCoupling:
    """(p - e A / c)^2 / 2m for a general vector potential; replaces Kinetic."""

    m: float
    em: EMPotentials
    kind = MIXED


@dataclass
class HamiltonianSpec:
    terms: list = field(default_factory=list)

    def __post_init__(self):
        self.terms = list(self.terms)
        for term in self.terms:
            if getattr(term, "kind", None) not in (POSITION, MOMENTUM, MIXED):
                raise TypeError(f"cannot classify Hamiltonian term {term!r}")

    def __add__(self, other):
        other_terms = other.terms if isinstance(other, HamiltonianSpec) else list(other)
        return HamiltonianSpec(self.terms + other_terms)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def of_type(self, cls) -> list:
        return [t for t in self.terms if isinstance(t, cls)]

    @property
    def has_spin(self) -> bool:
        return any(isinstance(t, (SpinMatrix, SpinField)) for t in self.terms)


# ---------------------------------------------------------------------------
# constructors


def free(m: float) -> HamiltonianSpec:
    return HamiltonianSpec([Kinetic(m)])


def h_inert(tr: FrameTrajectory, m: float) -> list:
    """Inertial-force terms seen in the frame ``tr``.

    Linear potential w.x' with w = -m R d^2Ã/dt^2 and the coupling
    -i hbar (Omega x').grad with Omega = dR/dt R^T.  The latter equals
    -omega.L with omega the frame angular velocity (Omega = -[omega]_x).
    """
    terms = []
    if not isinstance(tr, (Inertial, RotatingFrame)):
        def w(t):
            R = tr.rotation_derivs(t)[0]
            return -m * (R @ tr.tilde_derivs(t)[2])

        terms.append(LinearPotential(w))
    if not isinstance(tr, (Inertial, PolyTranslation)):
        def omega(t):
            Om = tr.omega_matrix(t)
            if np.max(np.abs(Om + Om.T)) > OMEGA_ANTISYM_TOL:
                raise ValueError("dR/dt R^T is not antisymmetric; trajectory is not a rotation")
            # -i hbar (Omega x).grad = (Omega x).p = -omega.L  when Omega = skew(-omega)
            return -unskew(Om)

        terms.append(Rotation(omega))
    return terms


_EPS = np.zeros((3, 3, 3))
_EPS[0, 1, 2] = _EPS[1, 2, 0] = _EPS[2, 0, 1] = 1.0
_EPS[0, 2, 1] = _EPS[2, 1, 0] = _EPS[1, 0, 2] = -1.0


def h_spin(Rtilde, t: float, hbar: float = 1.0) -> np.ndarray:
    """(hbar/4) dRt^l_j Rt^{kj} eps_{klm} sigma_m for the gauge rotation Rtilde."""
    from ..geometry5 import _frame_rotation

    Rt, Rt1 = _frame_rotation(Rtilde, t)
    return 0.25 * hbar * np.einsum("lj,kj,klm,mab->ab", Rt1, Rt, _EPS, SIGMA)


def spin_rotation_term(Rtilde, hbar: float = 1.0) -> SpinMatrix:
    return SpinMatrix(lambda t: h_spin(Rtilde, t, hbar))


def newton_coupling(phi, m: float) -> list:
    """Potential m * Phi.  ``phi`` is a field g (meaning Phi = g.x), a callable, or None."""
    if phi is None:
        return []
    if callable(phi):
        return [Potential(lambda x, t: m * np.asarray(phi(x)))]
    g = _vec3(phi)
    if not np.any(g):
        return []
    return [LinearPotential(m * g)]


def em_coupling(em: EMPotentials, m: float, hbar: float = 1.0, spinor: bool = False, rep=None) -> list:
    """Terms for minimal coupling D = d - (i e / c hbar) A.

    The spin term of the two-component case is taken from the Clifford
    elimination (field_strength_coupling), never written in by hand.
    """
    e, c = em.charge, em.c
    terms = []
    if em.uniform_B is not None:
        B = em.uniform_B
        # (p - eA/c)^2/2m = p^2/2m - (e/2mc) B.L + (e^2/8mc^2)|B x r|^2
        terms.append(Kinetic(m))
        if np.any(B):
            terms.append(Rotation(e * B / (2 * m * c)))

            def diamag(x, t):
                Bx = np.cross(B, x, axis=0)
                return e**2 / (8 * m * c**2) * np.sum(Bx**2, axis=0)

            terms.append(Potential(diamag))
        if spinor and np.any(B):
            F = magnetic_field_tensor(B)
            terms.append(SpinMatrix(field_strength_coupling(F, m, e, c, hbar, rep)))
    else:
        terms.append(MinimalCoupling(m, em))
        if spinor:
            terms.append(MagneticSpinField(em, m, hbar, rep))
    if em.scalar_fn is not None:
        terms.append(Potential(lambda x, t: e * np.asarray(em.scalar_fn(x, t))))
    return terms


class MagneticSpinField(SpinField):
    """Spin coupling for a general vector potential, with B = curl A on the grid."""

    def __init__(self, em: EMPotentials, m: float, hbar: float = 1.0, rep=None):
        self.em, self.m, self.hbar, self.rep = em, m, hbar, rep
        self.M = None

    def matrices(self, grid, t):
        F = magnetic_field_tensor(self.em.magnetic_field(grid, t))
        return field_strength_coupling(F, self.m, self.em.charge, self.em.c, self.hbar, self.rep)

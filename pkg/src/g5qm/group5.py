"""Homogeneous five-dimensional Galilei group G5.

Events live in (x1, x2, x3, x4, x5) with x4 = u*t and x5 = s/u, where ``u`` is an
arbitrary velocity scale.  The invariant quadratic form is

    eta(x, x) = |x|^2 - 2 x4 x5

and every group element acts linearly on events.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ORTHO_TOL = 1e-12

ETA = np.zeros((5, 5))
ETA[:3, :3] = np.eye(3)
ETA[3, 4] = ETA[4, 3] = -1.0
ETA.setflags(write=False)


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size > 3:
        raise ValueError(f"expected at most 3 components, got {a.size}")
    out = np.zeros(3)
    out[: a.size] = a
    return out


@dataclass(frozen=True)
class Event5:
    """A point of the extended space-time.  ``u`` is kept for unit conversion."""

    x: np.ndarray
    x4: float
    x5: float
    u: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "x", _vec3(self.x))
        object.__setattr__(self, "x4", float(self.x4))
        object.__setattr__(self, "x5", float(self.x5))
        if not (np.all(np.isfinite(self.x)) and np.isfinite(self.x4) and np.isfinite(self.x5)):
            raise ValueError("event components must be finite")

    @classmethod
    def from_ts(cls, x, t: float, s: float = 0.0, u: float = 1.0) -> "Event5":
        return cls(x, u * t, s / u, u)

    @classmethod
    def from_array(cls, a, u: float = 1.0) -> "Event5":
        a = np.asarray(a, dtype=float)
        return cls(a[:3], a[3], a[4], u)

    @property
    def t(self) -> float:
        return self.x4 / self.u

    @property
    def s(self) -> float:
        return self.x5 * self.u

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, [self.x4, self.x5]])


@dataclass(frozen=True)
class Boost5:
    """Group element (R, v, u): x' = R x - v t together with the x5 shift."""

    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    u: float = 1.0

    def __post_init__(self):
        R = np.array(self.R, dtype=float).reshape(3, 3)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "v", _vec3(self.v))
        object.__setattr__(self, "u", float(self.u))
        if not self.u > 0:
            raise ValueError("velocity scale u must be positive")
        if np.max(np.abs(R.T @ R - np.eye(3))) > ORTHO_TOL:
            raise ValueError("R is not orthogonal")
        if np.linalg.det(R) < 0:
            raise ValueError("only proper rotations (det R = +1) are admitted")

    @classmethod
    def identity(cls, u: float = 1.0) -> "Boost5":
        return cls(np.eye(3), np.zeros(3), u)

    @classmethod
    def random(cls, rng: np.random.Generator, vscale: float = 2.0, u: float = 1.0) -> "Boost5":
        from scipy.spatial.transform import Rotation

        R = Rotation.random(random_state=rng).as_matrix()
        # re-orthogonalise to push the residual well below ORTHO_TOL
        q, r = np.linalg.qr(R)
        R = q * np.sign(np.diag(r))
        return cls(R, vscale * rng.standard_normal(3), u)


@dataclass(frozen=True)
class Momentum5:
    """Five-momentum (p, m u, E/u)."""

    p: np.ndarray
    p4: float
    p5: float

    @classmethod
    def onshell(cls, p, m: float, u: float = 1.0) -> "Momentum5":
        p = _vec3(p)
        return cls(p, m * u, onshell_energy(p, m) / u)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.p, [self.p4, self.p5]])


def metric() -> np.ndarray:
    """Return a copy of eta (identical for upper and lower indices)."""
    return ETA.copy()


def matrix5(b: Boost5) -> np.ndarray:
    """The 5x5 matrix Lambda with x'^mu = Lambda^mu_nu x^nu."""
    L = np.zeros((5, 5))
    L[:3, :3] = b.R
    L[:3, 3] = -b.v / b.u
    L[3, 3] = 1.0
    L[4, :3] = -(b.v @ b.R) / b.u
    L[4, 3] = (b.v @ b.v) / (2.0 * b.u**2)
    L[4, 4] = 1.0
    return L


def apply_g5(b: Boost5, e: Event5) -> Event5:
    return Event5.from_array(matrix5(b) @ e.as_array(), u=e.u)


def quadratic_form(e) -> float:
    """x.x - 2 x4 x5 for an Event5 or a length-5 array."""
    a = e.as_array() if isinstance(e, Event5) else np.asarray(e, dtype=float)
    return float(a[:3] @ a[:3] - 2.0 * a[3] * a[4])


def contract(a, b) -> float:
    """eta_{mu nu} a^mu b^nu."""
    a = a.as_array() if hasattr(a, "as_array") else np.asarray(a)
    b = b.as_array() if hasattr(b, "as_array") else np.asarray(b)
    return float(a @ ETA @ b)


def compose(b1: Boost5, b2: Boost5) -> Boost5:
    """Element acting as b2 first, then b1."""
    if b1.u != b2.u:
        raise ValueError(f"cannot compose elements with different u ({b1.u} != {b2.u})")
    return Boost5(b1.R @ b2.R, b1.v + b1.R @ b2.v, b1.u)


def inverse(b: Boost5) -> Boost5:
    return Boost5(b.R.T, -b.R.T @ b.v, b.u)


def boost_phase(b: Boost5, x, t) -> np.ndarray:
    """Phase function f(x, t) = u * (x'5 - x5) = -v.(R x) + v^2 t / 2.

    A solution of the free Schroedinger equation is mapped to a solution by
    psi'(x', t) = exp(i m f / hbar) psi(x, t).  ``x`` may have shape (3,) or
    (3, ...) for evaluation on a grid.
    """
    x = np.asarray(x, dtype=float)
    Rx = np.tensordot(b.R, x, axes=(1, 0))
    return -np.tensordot(b.v, Rx, axes=(0, 0)) + 0.5 * (b.v @ b.v) * t


def onshell_energy(p, m: float) -> float:
    if not m > 0:
        raise ValueError("mass must be positive")
    p = _vec3(p)
    return float(p @ p / (2.0 * m))

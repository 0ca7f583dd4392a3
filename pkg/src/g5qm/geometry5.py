"""Non-inertial frames: the G5' coordinate map and the geometry it induces.

A frame trajectory carries a time-dependent rotation R(t) and translation A(t);
the inertial coordinates x are mapped to frame coordinates by
x' = R(t) x + A(t) with the accompanying shift of the fifth coordinate.  Dots
always denote d/dt (not d/dx4); the factors of ``u`` are kept explicit.

With Ã = R^T A the fifth coordinate transforms as

    x'5 = x5 + (1/u) [ dÃ/dt . x + Ã . dÃ/dt - 1/2 int_0^t |dÃ/dt|^2 dt' ]

which for constant R and A = -v t collapses to the G5 boost.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from .group5 import ETA, Event5

_EPS3 = np.finfo(float).eps ** (1.0 / 3.0)


def skew(w) -> np.ndarray:
    """Matrix of the cross product ``w x .``."""
    w = np.asarray(w, dtype=float)
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def unskew(K) -> np.ndarray:
    K = np.asarray(K, dtype=float)
    return 0.5 * np.array([K[2, 1] - K[1, 2], K[0, 2] - K[2, 0], K[1, 0] - K[0, 1]])


def _as3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    out = np.zeros(3)
    out[: a.size] = a
    return out


class FrameTrajectory(ABC):
    """Time-dependent frame data (R(t), A(t)) with derivatives up to third order.

    Subclasses implement :meth:`rotation_derivs` and :meth:`translation_derivs`,
    each returning the value and its first three time derivatives.
    """

    u: float = 1.0

    @abstractmethod
    def rotation_derivs(self, t: float) -> tuple[np.ndarray, ...]:
        ...

    @abstractmethod
    def translation_derivs(self, t: float) -> tuple[np.ndarray, ...]:
        ...

    # -- convenience accessors -------------------------------------------
    def R(self, t):
        return self.rotation_derivs(t)[0]

    def Rdot(self, t):
        return self.rotation_derivs(t)[1]

    def Rddot(self, t):
        return self.rotation_derivs(t)[2]

    def A(self, t):
        return self.translation_derivs(t)[0]

    def Adot(self, t):
        return self.translation_derivs(t)[1]

    def Addot(self, t):
        return self.translation_derivs(t)[2]

    def Adddot(self, t):
        return self.translation_derivs(t)[3]

    def with_u(self, u: float) -> "FrameTrajectory":
        import copy

        other = copy.copy(self)
        other.u = float(u)
        return other

    def omega_matrix(self, t) -> np.ndarray:
        """Omega = dR/dt R^T (antisymmetric)."""
        R, R1, _, _ = self.rotation_derivs(t)
        return R1 @ R.T

    def angular_velocity(self, t) -> np.ndarray:
        """Angular velocity of the frame axes relative to inertial space.

        Fixed inertial points appear to rotate with Omega = dR/dt R^T, so the
        axes themselves turn at -unskew(Omega).
        """
        return -unskew(self.omega_matrix(t))

    def tilde_derivs(self, t) -> tuple[np.ndarray, ...]:
        """Ã = R^T A and its first three time derivatives."""
        R0, R1, R2, R3 = self.rotation_derivs(t)
        A0, A1, A2, A3 = self.translation_derivs(t)
        return (
            R0.T @ A0,
            R1.T @ A0 + R0.T @ A1,
            R2.T @ A0 + 2 * R1.T @ A1 + R0.T @ A2,
            R3.T @ A0 + 3 * R2.T @ A1 + 3 * R1.T @ A2 + R0.T @ A3,
        )

    def kinetic_integral(self, t: float) -> float:
        """int_0^t |dÃ/dt|^2 dt', by adaptive Gauss-Kronrod quadrature."""
        if t == 0.0:
            return 0.0

        def f(s):
            w = self.tilde_derivs(s)[1]
            return float(w @ w)

        val, err = integrate.quad(f, 0.0, t, epsabs=0.0, epsrel=1e-12, limit=200)
        if not np.isfinite(val) or err > 1e-10 * max(abs(val), 1e-300):
            raise ArithmeticError(f"x5 quadrature did not converge on [0, {t}] (err={err:g})")
        return val


def _rot_from_angle(axis: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, ...]:
    """R = exp(theta K) and derivatives for a polynomial angle theta(t).

    ``theta`` holds (theta, theta', theta'', theta''').
    """
    K = skew(axis)
    K2 = K @ K
    K3 = K2 @ K
    R = np.eye(3) + math.sin(theta[0]) * K + (1.0 - math.cos(theta[0])) * K2
    th1, th2, th3 = theta[1], theta[2], theta[3]
    R1 = th1 * K @ R
    R2 = (th2 * K + th1**2 * K2) @ R
    R3 = (th3 * K + 3 * th1 * th2 * K2 + th1**3 * K3) @ R
    return R, R1, R2, R3


_ZERO3 = np.zeros(3)


def _derivative_table(c: np.ndarray) -> list:
    """Coefficient arrays of a polynomial (rows = powers) and its first three derivatives."""
    out = [c]
    for _ in range(3):
        c = (c * np.arange(c.shape[0]).reshape((-1,) + (1,) * (c.ndim - 1)))[1:] if c.shape[0] > 1 else np.zeros((1,) + c.shape[1:])
        out.append(c)
    return out


def _horner(c: np.ndarray, t: float):
    acc = c[-1]
    for row in c[-2::-1]:
        acc = acc * t + row
    return acc


@dataclass
class Inertial(FrameTrajectory):
    u: float = 1.0

    def rotation_derivs(self, t):
        return np.eye(3), np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((3, 3))

    def translation_derivs(self, t):
        return _ZERO3, _ZERO3, _ZERO3, _ZERO3

    def kinetic_integral(self, t):
        return 0.0


@dataclass
class PolyTranslation(FrameTrajectory):
    """R = I, A(t) = sum_k coeffs[k] t^k (coeffs has shape (K, 3))."""

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros((1, 3)))
    u: float = 1.0

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if c.shape[1] < 3:
            c = np.hstack([c, np.zeros((c.shape[0], 3 - c.shape[1]))])
        self.coeffs = c
        self._table = _derivative_table(c)

    def rotation_derivs(self, t):
        return np.eye(3), np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((3, 3))

    def _deriv_coeffs(self, order):
        return self._table[order]

    def translation_derivs(self, t):
        return tuple(np.array(_horner(c, t), dtype=float) for c in self._table)

    def kinetic_integral(self, t):
        c1 = self._deriv_coeffs(1)
        sq = sum(np.polynomial.polynomial.polymul(c1[:, k], c1[:, k]) for k in range(3))
        integ = np.polynomial.polynomial.polyint(sq)
        return float(np.polynomial.polynomial.polyval(t, integ))


def Boost(v, u: float = 1.0) -> PolyTranslation:
    """Uniformly moving frame: A(t) = -v t, so x' = x - v t."""
    return PolyTranslation(np.array([_ZERO3, -_as3(v)]), u=u)


def Accel(a, u: float = 1.0) -> PolyTranslation:
    """Uniformly accelerating frame: A(t) = a t^2 / 2."""
    return PolyTranslation(np.array([_ZERO3, _ZERO3, 0.5 * _as3(a)]), u=u)


@dataclass
class RotatingFrame(FrameTrajectory):
    """Frame whose axes turn about ``axis`` with angle theta(t), A = 0.

    ``angle_coeffs`` are polynomial coefficients of the frame angle; a frame
    spinning at constant rate omega has angle_coeffs = (0, omega).  Points fixed
    in inertial space then have coordinates x' = R(-theta) x.
    """

    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    angle_coeffs: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0]))
    u: float = 1.0

    def __post_init__(self):
        ax = _as3(self.axis)
        n = np.linalg.norm(ax)
        if n == 0:
            raise ValueError("rotation axis must be non-zero")
        self.axis = ax / n
        c = np.asarray(self.angle_coeffs, dtype=float).reshape(-1)
        self.angle_coeffs = c if c.size else np.zeros(1)
        self._table = _derivative_table(self.angle_coeffs)

    def angle_derivs(self, t):
        return np.array([float(_horner(c, t)) for c in self._table])

    def rotation_derivs(self, t):
        # coordinates rotate opposite to the axes
        return _rot_from_angle(self.axis, -self.angle_derivs(t))

    def translation_derivs(self, t):
        return _ZERO3, _ZERO3, _ZERO3, _ZERO3

    def kinetic_integral(self, t):
        return 0.0


def Rotate(axis, omega: float, u: float = 1.0) -> RotatingFrame:
    return RotatingFrame(axis, np.array([0.0, float(omega)]), u=u)


@dataclass
class Composite(FrameTrajectory):
    """Apply ``first`` and then ``second``: x'' = R2 (R1 x + A1) + A2."""

    first: FrameTrajectory
    second: FrameTrajectory
    u: float = 1.0

    def rotation_derivs(self, t):
        a = self.first.rotation_derivs(t)
        b = self.second.rotation_derivs(t)
        return _leibniz(b, a)

    def translation_derivs(self, t):
        R2 = self.second.rotation_derivs(t)
        A1 = self.first.translation_derivs(t)
        A2 = self.second.translation_derivs(t)
        prod = _leibniz(R2, A1)
        return tuple(p + q for p, q in zip(prod, A2))


_BINOM = np.zeros((4, 4, 4))  # _BINOM[n, k, j] = C(n, k) when k + j = n
for _n in range(4):
    for _k in range(_n + 1):
        _BINOM[_n, _k, _n - _k] = math.comb(_n, _k)


def _leibniz(f, g):
    """Derivatives (orders 0..3) of the product f(t) g(t)."""
    F = np.asarray(f)
    G = np.asarray(g)
    if G.ndim == 2:
        prods = np.matmul(F[:, None], G[None, :, :, None])[..., 0]
    else:
        prods = np.matmul(F[:, None], G[None])
    return tuple(np.tensordot(_BINOM, prods, axes=([1, 2], [0, 1])))


@dataclass
class CallableTrajectory(FrameTrajectory):
    """Adapter for user-supplied R(t), A(t) without analytic derivatives.

    Derivatives use five-point central differences with step ``scale * eps^(1/3)``
    (seven points for the third derivative).
    """

    R_fn: object = None
    A_fn: object = None
    scale: float = 1.0
    u: float = 1.0

    def _derivs(self, fn, t):
        h = self.scale * _EPS3 * 10.0
        f = {k: np.asarray(fn(t + k * h), dtype=float) for k in range(-3, 4)}
        d1 = (f[-2] - 8 * f[-1] + 8 * f[1] - f[2]) / (12 * h)
        d2 = (-f[-2] + 16 * f[-1] - 30 * f[0] + 16 * f[1] - f[2]) / (12 * h**2)
        d3 = (f[-3] - 8 * f[-2] + 13 * f[-1] - 13 * f[1] + 8 * f[2] - f[3]) / (8 * h**3)
        return f[0], d1, d2, d3

    def rotation_derivs(self, t):
        if self.R_fn is None:
            return Inertial().rotation_derivs(t)
        return self._derivs(self.R_fn, t)

    def translation_derivs(self, t):
        if self.A_fn is None:
            return _ZERO3, _ZERO3, _ZERO3, _ZERO3
        return tuple(d.reshape(3) for d in self._derivs(self.A_fn, t))


# ---------------------------------------------------------------------------
# coordinate maps


def x5_shift(tr: FrameTrajectory, x, t: float) -> np.ndarray:
    """u * (x'5 - x5) at inertial position ``x`` (shape (3,) or (3, ...))."""
    At, At1, _, _ = tr.tilde_derivs(t)
    x = np.asarray(x, dtype=float)
    return np.tensordot(At1, x, axes=(0, 0)) + At @ At1 - 0.5 * tr.kinetic_integral(t)


def frame_phase(tr: FrameTrajectory, xp, t: float) -> np.ndarray:
    """u * (x'5 - x5) expressed through the frame position ``xp``.

    Equals k.x' - 1/2 int |k|^2 with k = R dÃ/dt = dA/dt - Omega A.
    """
    R, _, _, _ = tr.rotation_derivs(t)
    _, At1, _, _ = tr.tilde_derivs(t)
    k = R @ At1
    xp = np.asarray(xp, dtype=float)
    return np.tensordot(k, xp, axes=(0, 0)) - 0.5 * tr.kinetic_integral(t)


def apply_g5p(tr: FrameTrajectory, e: Event5) -> Event5:
    t = e.x4 / tr.u
    R, _, _, _ = tr.rotation_derivs(t)
    A = tr.translation_derivs(t)[0]
    xp = R @ e.x + A
    x5p = e.x5 + x5_shift(tr, e.x, t) / tr.u
    return Event5(xp, e.x4, float(x5p), tr.u)


def inverse_g5p(tr: FrameTrajectory, ep: Event5) -> Event5:
    t = ep.x4 / tr.u
    R, _, _, _ = tr.rotation_derivs(t)
    A = tr.translation_derivs(t)[0]
    x = R.T @ (ep.x - A)
    x5 = ep.x5 - x5_shift(tr, x, t) / tr.u
    return Event5(x, ep.x4, float(x5), tr.u)


def metric(tr: FrameTrajectory, xp, t: float) -> np.ndarray:
    """Contravariant frame metric g'^{mu nu} at frame position ``xp``."""
    xp = _as3(xp)
    u = tr.u
    R = tr.rotation_derivs(t)[0]
    Om = tr.omega_matrix(t)
    At2 = tr.tilde_derivs(t)[2]
    g = ETA.copy()
    g5 = -(Om @ xp) / u
    g[:3, 4] = g5
    g[4, :3] = g5
    g[4, 4] = -2.0 / u**2 * ((R @ At2) @ xp)
    return g


def lower_metric(g_upper) -> np.ndarray:
    g_upper = np.asarray(g_upper, dtype=float)
    try:
        g_lower = np.linalg.inv(g_upper)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("metric is singular") from exc
    resid = np.max(np.abs(g_upper @ g_lower - np.eye(g_upper.shape[0])))
    if not resid < 1e-12 * max(1.0, np.max(np.abs(g_upper)) * np.max(np.abs(g_lower))):
        raise np.linalg.LinAlgError(f"metric inversion residual too large ({resid:g})")
    return g_lower


def connection(tr: FrameTrajectory, xp, t: float) -> np.ndarray:
    """Affine connection Gamma'^lam_{mu nu}, indexed ``G[lam, mu, nu]``.

    Only the families Gamma^i_{4j}, Gamma^i_{44}, Gamma^5_{4i}, Gamma^5_{44}
    (and their mirror in the lower pair) are non-zero.
    """
    xp = _as3(xp)
    u = tr.u
    R, R1, R2, _ = tr.rotation_derivs(t)
    _, _, At2, At3 = tr.tilde_derivs(t)
    G = np.zeros((5, 5, 5))

    gi4j = (R @ R1.T) / u
    G[:3, 3, :3] = gi4j
    G[:3, :3, 3] = gi4j
    G[:3, 3, 3] = (R @ R2.T @ xp - R @ At2) / u**2

    g54i = -(R @ At2) / u**2
    G[4, 3, :3] = g54i
    G[4, :3, 3] = g54i
    G[4, 3, 3] = -(((2.0 * R1 @ At2) + (R @ At3)) @ xp) / u**3
    return G


# ---------------------------------------------------------------------------
# fuenfbein and spin connection


class Gauge(Enum):
    JACOBIAN = "jacobian"
    ROTATED = "rotated"


def _frame_rotation(Rtilde, t):
    """Value and first derivative of the gauge rotation Rtilde(t)."""
    if isinstance(Rtilde, FrameTrajectory):
        R0, R1, _, _ = Rtilde.rotation_derivs(t)
        return R0, R1
    if callable(Rtilde):
        h = _EPS3 * 10.0
        f = [np.asarray(Rtilde(t + k * h), dtype=float) for k in (-2, -1, 0, 1, 2)]
        return f[2], (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    R0 = np.asarray(Rtilde, dtype=float)
    return R0, np.zeros((3, 3))


def _jacobian_and_derivs(tr: FrameTrajectory, xp, t):
    """Gauge-1 fuenfbein h = dx'/dx and d h / dx'^lam for lam = 1..5."""
    xp = _as3(xp)
    u = tr.u
    R, R1, R2, _ = tr.rotation_derivs(t)
    A, A1, A2, _ = tr.translation_derivs(t)
    _, At1, At2, At3 = tr.tilde_derivs(t)
    Om = R1 @ R.T
    Om1 = R2 @ R.T + R1 @ R1.T

    h = np.zeros((5, 5))
    h[:3, :3] = R
    h[:3, 3] = (Om @ (xp - A) + A1) / u
    h[3, 3] = 1.0
    h[4, :3] = At1 / u
    h[4, 3] = ((At2 @ (R.T @ xp)) + 0.5 * (At1 @ At1)) / u**2
    h[4, 4] = 1.0

    dh = np.zeros((5, 5, 5))  # dh[lam] = d h / d x'^lam
    for k in range(3):
        dh[k][:3, 3] = Om[:, k] / u
        dh[k][4, 3] = (R @ At2)[k] / u**2
    d4 = np.zeros((5, 5))
    d4[:3, :3] = R1
    d4[:3, 3] = (Om1 @ (xp - A) - Om @ A1 + A2) / u
    d4[4, :3] = At2 / u
    d4[4, 3] = ((At3 @ (R.T @ xp)) + (At2 @ (R1.T @ xp)) + (At1 @ At2)) / u**2
    dh[3] = d4 / u
    return h, dh


def funfbein(tr: FrameTrajectory, xp, t: float, gauge: Gauge = Gauge.JACOBIAN, Rtilde=None):
    """Frame field h^mu_a (rows: coordinate index, columns: frame index).

    JACOBIAN gauge: h = dx'/dx.  ROTATED gauge: the spatial frame columns are
    mixed by Rtilde, h'^mu_j = Rtilde_j^k h^mu_k, i.e. h' = h diag(Rtilde^T, 1, 1).
    """
    return funfbein_with_derivs(tr, xp, t, gauge, Rtilde)[0]


def funfbein_with_derivs(tr, xp, t, gauge=Gauge.JACOBIAN, Rtilde=None):
    h, dh = _jacobian_and_derivs(tr, xp, t)
    if Gauge(gauge) is Gauge.JACOBIAN:
        return h, dh
    if Rtilde is None:
        raise ValueError("ROTATED gauge needs a gauge rotation Rtilde")
    Rt, Rt1 = _frame_rotation(Rtilde, t)
    L = np.eye(5)
    L[:3, :3] = Rt.T
    L1 = np.zeros((5, 5))
    L1[:3, :3] = Rt1.T
    h2 = h @ L
    dh2 = np.einsum("lmb,ba->lma", dh, L)
    dh2[3] += h @ L1 / tr.u
    return h2, dh2


def covariant_derivative_frame(tr, xp, t, gauge=Gauge.JACOBIAN, Rtilde=None):
    """D_lam h^nu_b = d_lam h^nu_b + Gamma^nu_{lam rho} h^rho_b, as ``D[lam, nu, b]``."""
    h, dh = funfbein_with_derivs(tr, xp, t, gauge, Rtilde)
    G = connection(tr, xp, t)
    return dh + np.einsum("nlr,rb->lnb", G, h)


def spin_connection(tr, xp, t, gauge=Gauge.JACOBIAN, rep=None, Rtilde=None):
    """Spinor connection Gamma'_lam, returned with shape (5, 4, 4).

    Gamma'_lam = 1/8 [gamma^a, gamma^b] g'_{mu nu} h^mu_a D_lam h^nu_b.
    """
    from .clifford import standard_rep

    rep = standard_rep() if rep is None else rep
    h = funfbein(tr, xp, t, gauge, Rtilde)
    Dh = covariant_derivative_frame(tr, xp, t, gauge, Rtilde)
    g_low = lower_metric(metric(tr, xp, t))
    # W[lam, a, b] = g_{mu nu} h^mu_a D_lam h^nu_b
    W = np.einsum("mn,ma,lnb->lab", g_low, h, Dh)
    gam = rep.gamma
    comm = np.einsum("aij,bjk->abik", gam, gam) - np.einsum("bij,ajk->abik", gam, gam)
    return np.einsum("abik,lab->lik", comm, W) / 8.0

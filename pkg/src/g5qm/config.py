"""Flat ``key = value`` scenario configs and the trajectory grammar.

Config syntax
-------------
One ``key = value`` per line; ``#`` starts a comment; vectors are comma
separated (missing trailing components are zero).  Keys:

==============  =====================================================  =========
key             meaning                                                default
==============  =====================================================  =========
scenario        check | covariance | equivalence | spin_frame | em |   required
                custom-evolve (``evolve`` is accepted as an alias)
points          grid points per axis, e.g. ``1024`` or ``256, 256``      1024
lengths         box length(s); one value is reused for every axis      40
trajectory      frame trajectory (grammar below)                       inertial
center          initial packet centre                                  0
momentum        initial packet momentum                                0
width           initial packet position spread                         1
spin            initial spinor, two real numbers (makes a Pauli        none
                spinor)
m, hbar, u      mass, Planck constant, bookkeeping velocity scale      1, 1, 1
e, c            charge and light speed (em scenario)                   1, 1
T               horizon                                                1
nsteps          number of Strang steps                                 100
stride          observables every ``stride`` steps (0: only ends)      0
g, a            gravity and frame acceleration (equivalence)           0, 0
omega           frame angular velocity (spin_frame)                    0
B               uniform magnetic field (em)                            0
potential       none | linear(wx,wy,wz) | harmonic(k) (custom-evolve)  none
tolerance       pass threshold of the scenario's primary metric        scenario
seed            RNG seed for ``check`` (overridden by G5_SEED)           0
==============  =====================================================  =========

Trajectory grammar
------------------
::

    trajectory := piece ("then" piece)*
    piece      := inertial | boost(vx,vy,vz) | accel(ax,ay,az)
                | rotate(nx,ny,nz,omega) | poly(c0; c1; ...)

``poly`` coefficients are 3-vectors ``x,y,z`` separated by ``;`` and give
A(t) = c0 + c1 t + c2 t^2 + ...  ``P then Q`` applies P first and then Q.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields

import numpy as np

from . import geometry5

SCENARIOS = ("check", "covariance", "equivalence", "spin_frame", "em", "custom-evolve")
_ALIASES = {"evolve": "custom-evolve"}

DEFAULT_TOLERANCE = {
    "check": 0.0,
    "covariance": 1e-6,
    "equivalence": 1e-8,
    "spin_frame": 1e-8,
    "em": 1e-6,
    "custom-evolve": 1e-10,
}


class ConfigError(ValueError):
    """Invalid config text; ``line`` is 1-based (0 for whole-file problems)."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


# ---------------------------------------------------------------------------
# trajectory grammar

_PIECE = re.compile(r"^\s*([a-z]+)\s*(?:\((.*)\))?\s*$")


def _floats(text: str, n: int | None, what: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")] if text.strip() else []
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ValueError(f"{what}: expected numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ValueError(f"{what}: expected {n} numbers, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise ValueError(f"{what}: non-finite value")
    return vals


def _piece(text: str, u: float) -> geometry5.FrameTrajectory:
    m = _PIECE.match(text)
    if not m:
        raise ValueError(f"malformed trajectory piece {text.strip()!r}")
    kind, args = m.group(1), m.group(2)
    if kind == "inertial":
        if args is not None and args.strip():
            raise ValueError("inertial takes no arguments")
        return geometry5.Inertial(u=u)
    if args is None:
        raise ValueError(f"{kind} needs arguments")
    if kind == "boost":
        return geometry5.Boost(_floats(args, 3, "boost"), u=u)
    if kind == "accel":
        return geometry5.Accel(_floats(args, 3, "accel"), u=u)
    if kind == "rotate":
        v = _floats(args, 4, "rotate")
        return geometry5.Rotate(v[:3], v[3], u=u)
    if kind == "poly":
        rows = [_floats(r, 3, "poly coefficient") for r in args.split(";")]
        return geometry5.PolyTranslation(np.array(rows), u=u)
    raise ValueError(f"unknown trajectory kind {kind!r}")


def parse_trajectory(text: str, u: float = 1.0) -> geometry5.FrameTrajectory:
    pieces = re.split(r"\bthen\b", text)
    traj = _piece(pieces[0], u)
    for p in pieces[1:]:
        traj = geometry5.Composite(traj, _piece(p, u), u=u)
    return traj


# ---------------------------------------------------------------------------


def _vec(values, n=3):
    out = [0.0] * n
    for i, v in enumerate(values[:n]):
        out[i] = v
    return tuple(out)


@dataclass
class ScenarioConfig:
    scenario: str
    points: tuple = (1024,)
    lengths: tuple = (40.0,)
    trajectory: str = "inertial"
    center: tuple = (0.0, 0.0, 0.0)
    momentum: tuple = (0.0, 0.0, 0.0)
    width: float = 1.0
    spin: tuple | None = None
    m: float = 1.0
    hbar: float = 1.0
    u: float = 1.0
    e: float = 1.0
    c: float = 1.0
    T: float = 1.0
    nsteps: int = 100
    stride: int = 0
    g: tuple = (0.0, 0.0, 0.0)
    a: tuple = (0.0, 0.0, 0.0)
    omega: tuple = (0.0, 0.0, 0.0)
    B: tuple = (0.0, 0.0, 0.0)
    potential: str = "none"
    tolerance: float | None = None
    seed: int = 0
    out: str | None = field(default=None, repr=False)

    @property
    def tol(self) -> float:
        return DEFAULT_TOLERANCE[self.scenario] if self.tolerance is None else self.tolerance

    def trajectory_obj(self) -> geometry5.FrameTrajectory:
        return parse_trajectory(self.trajectory, self.u)

    def dump(self) -> str:
        """Normalised config text; parse_config(dump()) reproduces the config."""
        lines = []
        for f in fields(self):
            if f.name == "out":
                continue
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, tuple):
                v = ", ".join(_fmt(x) for x in v)
            elif isinstance(v, float):
                v = _fmt(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


_FLOATS = {"width", "m", "hbar", "u", "e", "c", "T", "tolerance"}
_INTS = {"nsteps", "stride", "seed"}
_VECS = {"center", "momentum", "g", "a", "omega", "B"}


def parse_config(text: str) -> ScenarioConfig:
    values: dict = {}
    where: dict = {}
    known = {f.name for f in fields(ScenarioConfig)} - {"out"}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = _convert(key, val)
        except ValueError as exc:
            raise ConfigError(str(exc), lineno) from None
        where[key] = lineno

    if "scenario" not in values:
        raise ConfigError("missing scenario")
    cfg = ScenarioConfig(**values)
    _validate(cfg, where)
    return cfg


def _convert(key, val):
    if key == "scenario":
        val = _ALIASES.get(val, val)
        if val not in SCENARIOS:
            raise ValueError(f"unknown scenario {val!r} (expected one of {', '.join(SCENARIOS)})")
        return val
    if key in ("trajectory", "potential"):
        return val
    if key in _FLOATS:
        x = _floats(val, 1, key)[0]
        return x
    if key in _INTS:
        try:
            return int(val)
        except ValueError:
            raise ValueError(f"{key}: expected an integer, got {val!r}") from None
    if key in _VECS:
        vals = _floats(val, None, key)
        if not 1 <= len(vals) <= 3:
            raise ValueError(f"{key}: expected 1 to 3 components")
        return _vec(vals)
    if key == "points":
        try:
            return tuple(int(p) for p in val.split(","))
        except ValueError:
            raise ValueError(f"points: expected integers, got {val!r}") from None
    if key == "lengths":
        return tuple(_floats(val, None, key))
    if key == "spin":
        return tuple(_floats(val, 2, key))
    raise ValueError(f"unhandled key {key!r}")  # pragma: no cover


def _validate(cfg: ScenarioConfig, where: dict):
    def fail(msg, key):
        raise ConfigError(msg, where.get(key, 0))

    if not 1 <= len(cfg.points) <= 3:
        fail("points: 1 to 3 axes", "points")
    for n in cfg.points:
        if n < 2 or n & (n - 1):
            fail(f"points: {n} is not a power of two", "points")
    if len(cfg.lengths) not in (1, len(cfg.points)):
        fail("lengths: give one value or one per axis", "lengths")
    if any(L <= 0 for L in cfg.lengths):
        fail("lengths must be positive", "lengths")
    for key in ("m", "hbar", "u", "c", "width"):
        if not getattr(cfg, key) > 0:
            fail(f"{key} must be positive", key)
    if cfg.nsteps < 1:
        fail("nsteps must be >= 1", "nsteps")
    if cfg.stride < 0:
        fail("stride must be >= 0", "stride")
    if not cfg.T > 0:
        fail("T must be positive", "T")
    if cfg.tolerance is not None and not cfg.tolerance > 0:
        fail("tolerance must be positive", "tolerance")
    try:
        cfg.trajectory_obj()
    except ValueError as exc:
        fail(f"trajectory: {exc}", "trajectory")
    try:
        parse_potential(cfg.potential)
    except ValueError as exc:
        fail(f"potential: {exc}", "potential")
    if cfg.scenario == "em" and cfg.spin is None:
        fail("em scenario needs a spin", "scenario")


def parse_potential(text: str):
    """``none``, ``linear(wx,wy,wz)`` or ``harmonic(k)`` -> (kind, params)."""
    m = _PIECE.match(text)
    if not m:
        raise ValueError(f"malformed potential {text!r}")
    kind, args = m.group(1), m.group(2)
    if kind == "none" and not (args or "").strip():
        return ("none", ())
    if kind == "linear" and args is not None:
        return ("linear", tuple(_floats(args, 3, "linear")))
    if kind == "harmonic" and args is not None:
        return ("harmonic", tuple(_floats(args, 1, "harmonic")))
    raise ValueError(f"unknown potential {text!r}")

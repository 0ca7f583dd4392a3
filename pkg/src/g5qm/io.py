"""Output files: observable series (CSV), reports (JSON) and state dumps.

State dump layout (``state.bin``, all little-endian)
----------------------------------------------------
======  ==============  ==============================================
offset  type            content
======  ==============  ==============================================
0       4 bytes         magic ``b"G5ST"``
4       uint32          format version (1)
8       uint32          dims (1 to 3)
12      uint32          ncomp (1 scalar, 2 Pauli spinor)
16      dims x uint64   points per axis
..      dims x float64  box lengths
..      3 x float64     t, m, hbar
..      payload         ncomp * prod(points) complex values as
                        interleaved (re, im) float64 pairs
======  ==============  ==============================================

The payload is component-major; within a component the grid is stored in C
order with axis 0 (x) varying slowest.  Grid point ``i`` on an axis of
length L with n points sits at ``-L/2 + i L / n``.
"""
from __future__ import annotations

import csv
import json
import math
import struct
from pathlib import Path

import numpy as np

from .dynamics.grid import Grid
from .dynamics.states import PauliSpinor, ScalarWavefunction

SERIES_COLUMNS = [
    "t", "norm",
    "mean_x", "mean_y", "mean_z",
    "mean_px", "mean_py", "mean_pz",
    "var_x", "var_p", "energy",
]

MAGIC = b"G5ST"
VERSION = 1


def _num(x: float) -> str:
    return format(float(x), ".17g")


def write_series(path, records) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_COLUMNS)
        for r in records:
            w.writerow([_num(v) for v in r.row()])
    return path


def read_series(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def write_report(path, results: list) -> Path:
    """JSON array of result dicts, keys sorted for byte-stable output."""
    path = Path(path)
    text = json.dumps(_jsonable(list(results)), indent=2, sort_keys=True)
    path.write_text(text + "\n")
    return path


def write_state(path, state) -> Path:
    grid = state.grid
    comps = np.ascontiguousarray(state.components, dtype="<c16")
    header = MAGIC + struct.pack("<III", VERSION, grid.dims, comps.shape[0])
    header += struct.pack(f"<{grid.dims}Q", *grid.points)
    header += struct.pack(f"<{grid.dims}d", *grid.lengths)
    header += struct.pack("<3d", state.t, state.m, state.hbar)
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(header)
        fh.write(comps.tobytes(order="C"))
    return path


def read_state(path):
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError("not a state dump (bad magic)")
    version, dims, ncomp = struct.unpack_from("<III", data, 4)
    if version != VERSION:
        raise ValueError(f"unsupported state dump version {version}")
    off = 16
    points = struct.unpack_from(f"<{dims}Q", data, off)
    off += 8 * dims
    lengths = struct.unpack_from(f"<{dims}d", data, off)
    off += 8 * dims
    t, m, hbar = struct.unpack_from("<3d", data, off)
    off += 24
    grid = Grid(points, lengths)
    payload = np.frombuffer(data, dtype="<c16", offset=off).reshape((ncomp,) + grid.shape)
    payload = payload.astype(complex)
    if ncomp == 1:
        return ScalarWavefunction(grid, payload[0], t, m, hbar)
    return PauliSpinor(grid, payload, t, m, hbar)

import json
import struct

import numpy as np
import pytest

from g5qm import cli, geometry5, io
from g5qm.config import ConfigError, parse_config, parse_potential, parse_trajectory
from g5qm.dynamics.grid import Grid
from g5qm.dynamics.states import make_gaussian

SMALL = """\
scenario = covariance   # accelerated frame
points = 256
lengths = 40
trajectory = accel(1, 0, 0)
T = 0.5
nsteps = 256
stride = 64
"""


# config ---------------------------------------------------------------------


def test_defaults():
    cfg = parse_config("scenario = evolve\n")
    assert cfg.scenario == "custom-evolve"
    assert (cfg.m, cfg.hbar, cfg.u, cfg.e, cfg.c) == (1.0, 1.0, 1.0, 1.0, 1.0)
    assert cfg.points == (1024,) and cfg.lengths == (40.0,)
    assert cfg.trajectory == "inertial" and cfg.spin is None
    assert cfg.tol == 1e-10 and cfg.seed == 0


def test_vectors_are_padded():
    cfg = parse_config("scenario = equivalence\ng = 0, -1\n")
    assert cfg.g == (0.0, -1.0, 0.0)


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("", 0, "missing scenario"),
        ("points = 64\n", 0, "missing scenario"),
        ("scenario = nope\n", 1, "unknown scenario"),
        ("scenario = evolve\nfoo = 1\n", 2, "unknown key"),
        ("scenario = evolve\nT = 1\nT = 2\n", 3, "duplicate"),
        ("scenario = evolve\n\nnsteps = many\n", 3, "integer"),
        ("scenario = evolve\nwidth\n", 2, "key = value"),
        ("scenario = evolve\npoints = 100\n", 2, "power of two"),
        ("scenario = evolve\nm = -1\n", 2, "positive"),
        ("scenario = evolve\ncenter = 1, 2, 3, 4\n", 2, "1 to 3"),
        ("scenario = evolve\nT = nan\n", 2, "non-finite"),
        ("scenario = covariance\ntrajectory = spin(1)\n", 2, "unknown trajectory"),
        ("scenario = evolve\npotential = cubic(1)\n", 2, "unknown potential"),
        ("scenario = em\nB = 0, 0, 1\n", 1, "spin"),
        ("scenario = evolve\nspin = 1\n", 2, "2 numbers"),
    ],
)
def test_config_errors(text, line, fragment):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_dump_roundtrip():
    cfg = parse_config(SMALL + "spin = 1, 0.5\ntolerance = 1e-7\n")
    again = parse_config(cfg.dump())
    assert again == cfg


@pytest.mark.parametrize(
    "text, cls",
    [
        ("inertial", geometry5.Inertial),
        ("boost(1, 0, 0)", geometry5.PolyTranslation),
        ("accel(0,0,-9.8)", geometry5.PolyTranslation),
        ("rotate(0, 0, 1, 0.5)", geometry5.RotatingFrame),
        ("poly(0,0,0; 1,0,0; 0,0.5,0)", geometry5.PolyTranslation),
        ("boost(1,0,0) then rotate(0,0,1,1)", geometry5.Composite),
    ],
)
def test_trajectory_grammar(text, cls):
    assert isinstance(parse_trajectory(text), cls)


def test_trajectory_values():
    tr = parse_trajectory("poly(0,0,0; 1,0,0; 0,0.5,0)", u=2.0)
    assert tr.u == 2.0
    assert np.allclose(tr.A(2.0), [2.0, 2.0, 0.0])
    assert np.allclose(parse_trajectory("boost(0.5,0,0)").A(2.0), [-1.0, 0, 0])


@pytest.mark.parametrize("text", ["boost(1,0)", "inertial(3)", "accel", "rotate(0,0,0,1)", "boost(1,0,0) then"])
def test_trajectory_errors(text):
    with pytest.raises(ValueError):
        parse_trajectory(text)


def test_potentials():
    assert parse_potential("none") == ("none", ())
    assert parse_potential("linear(1, 0, 0)") == ("linear", (1.0, 0.0, 0.0))
    assert parse_potential("harmonic(2)") == ("harmonic", (2.0,))


# io -------------------------------------------------------------------------


@pytest.mark.parametrize("spin", [None, [1.0, 0.5j]])
def test_state_roundtrip(tmp_path, spin):
    s = make_gaussian(Grid((16, 8), (4.0, 2.0)), [0.2, 0.1], [1.0, 0.0], 0.7, m=1.5, hbar=0.9, spin=spin, t=0.25)
    back = io.read_state(io.write_state(tmp_path / "state.bin", s))
    assert type(back) is type(s)
    assert back.grid == s.grid and (back.t, back.m, back.hbar) == (0.25, 1.5, 0.9)
    assert np.array_equal(back.psi, s.psi)


def test_state_layout(tmp_path):
    s = make_gaussian(Grid((8,), (2.0,)))
    data = io.write_state(tmp_path / "s.bin", s).read_bytes()
    assert data[:4] == b"G5ST"
    assert struct.unpack_from("<III", data, 4) == (1, 1, 1)
    assert struct.unpack_from("<Q", data, 16) == (8,)
    assert len(data) == 16 + 8 + 8 + 24 + 8 * 16
    payload = np.frombuffer(data[-128:], dtype="<c16")
    assert np.array_equal(payload, s.psi)


def test_bad_magic(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"NOPE" + bytes(64))
    with pytest.raises(ValueError):
        io.read_state(p)


def test_empty_report(tmp_path):
    assert json.loads(io.write_report(tmp_path / "r.json", []).read_text()) == []


def test_report_is_stable(tmp_path):
    entries = [{"b": np.float64(1.5), "a": np.array([1, 2]), "pass": np.bool_(True), "bad": float("nan")}]
    text = io.write_report(tmp_path / "r.json", entries).read_text()
    assert json.loads(text) == [{"a": [1, 2], "b": 1.5, "bad": None, "pass": True}]
    assert text.index('"a"') < text.index('"b"')


# cli ------------------------------------------------------------------------


def test_usage_errors(capsys):
    assert cli.main([]) == cli.EXIT_USAGE
    assert cli.main(["frobnicate"]) == cli.EXIT_USAGE
    assert cli.main(["--help"]) == cli.EXIT_OK


def test_missing_config_is_io_error(tmp_path):
    assert cli.main(["run", str(tmp_path / "absent.cfg")]) == cli.EXIT_IO


def test_bad_config_is_usage_error(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("scenario = evolve\nnsteps = 0\n")
    assert cli.main(["run", str(p)]) == cli.EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_dump_config(tmp_path, capsys):
    p = tmp_path / "a.cfg"
    p.write_text(SMALL)
    assert cli.main(["run", str(p), "--dump-config"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert parse_config(out) == parse_config(SMALL)


def test_run_writes_outputs_and_is_deterministic(tmp_path, capsys):
    p = tmp_path / "a.cfg"
    p.write_text(SMALL)
    outs = []
    for name in ("o1", "o2"):
        assert cli.main(["run", str(p), "--out", str(tmp_path / name)]) == cli.EXIT_OK
        outs.append(tmp_path / name)
    for f in ("report.json", "series_a.csv", "series_b.csv", "state.bin"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
    rep = json.loads((outs[0] / "report.json").read_text())
    assert rep[0]["metric"] == "l2_distance" and rep[0]["pass"] is True
    series = io.read_series(outs[0] / "series_b.csv")
    assert series.shape == (5, len(io.SERIES_COLUMNS))
    assert "PASS" in capsys.readouterr().out


def test_failed_tolerance_exit_code(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text(SMALL.replace("nsteps = 256", "nsteps = 2") + "tolerance = 1e-14\n")
    assert cli.main(["run", str(p), "--out", str(tmp_path / "o")]) == cli.EXIT_FAIL
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep[0]["pass"] is False


def test_several_configs_use_subdirectories(tmp_path):
    a, b = tmp_path / "a.cfg", tmp_path / "b.cfg"
    a.write_text(SMALL)
    b.write_text("scenario = evolve\npoints = 64\nlengths = 20\nnsteps = 10\n")
    assert cli.main(["run", str(a), str(b), "--out", str(tmp_path / "o"), "--jobs", "2"]) == cli.EXIT_OK
    assert (tmp_path / "o" / "a" / "report.json").exists()
    assert (tmp_path / "o" / "b" / "series.csv").exists()


def test_duplicate_config_names(tmp_path):
    (tmp_path / "x").mkdir()
    a, b = tmp_path / "a.cfg", tmp_path / "x" / "a.cfg"
    for p in (a, b):
        p.write_text("scenario = evolve\npoints = 64\nnsteps = 2\n")
    assert cli.main(["run", str(a), str(b), "--out", str(tmp_path / "o")]) == cli.EXIT_USAGE


def test_unwritable_output_is_io_error(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("scenario = evolve\npoints = 64\nnsteps = 2\n")
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["run", str(p), "--out", str(blocker / "sub")]) == cli.EXIT_IO


def test_check_quick(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("G5_SEED", "3")
    assert cli.main(["check", "--quick", "--out", str(tmp_path)]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "(seed 3)" in out
    entries = json.loads((tmp_path / "report.json").read_text())
    assert entries and all(e["pass"] for e in entries)


def test_bad_seed_env(monkeypatch):
    monkeypatch.setenv("G5_SEED", "abc")
    assert cli.main(["check", "--quick"]) == cli.EXIT_USAGE

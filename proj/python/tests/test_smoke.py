import csv
import io

import pytest

import epdyn


def test_presets():
    names = epdyn.preset_names()
    assert len(names) == 16
    cfg = epdyn.preset("trajectory-1")
    assert cfg["loop"]["direction"] == "CW"
    assert cfg["initial_state"] == "ALPHA"


def test_trajectory_one_summary():
    cfg = epdyn.preset("trajectory-1")
    cfg["loop"]["samples"] = 201
    s = epdyn.run(cfg)
    assert s["fidelity_beta"] >= 0.9
    assert s["crossings"] == 0
    assert s["dynamic_vorticity"] == -0.5


def test_trajectory_columns():
    cfg = epdyn.preset("trajectory-2")
    cfg["loop"]["samples"] = 51
    tr = epdyn.trajectory(cfg)
    assert len(tr["t_us"]) == 51
    assert tr["t_us"][-1] == pytest.approx(250.0)
    for a, b in zip(tr["psi0"], tr["psi1"]):
        assert abs(a) ** 2 + abs(b) ** 2 == pytest.approx(1.0)


def test_vorticity_of_a_far_loop():
    cfg = epdyn.preset("trajectory-1")
    cfg["loop"]["j_center"] = 0.15
    v = epdyn.vorticity(cfg)
    assert v["dynamic_quantized"] == 0
    assert v["enclosed_eps"] == 0


def test_sweep_is_worker_independent():
    spec = {
        "base": {"preset": "trajectory-1", "loop": {"samples": 51}},
        "axis1": {"name": "NOISE_INTENSITY", "values": [0.0, 0.5]},
        "axis2": {"name": "SEED", "values": [1, 2]},
    }
    one = epdyn.sweep(spec, 1)
    assert epdyn.sweep(spec, 3) == one
    rows = list(csv.DictReader(io.StringIO(one)))
    assert len(rows) == 4
    assert all(r["error"] == "" for r in rows)


def test_table_agrees():
    t = epdyn.table(samples=201)
    rows = [r for fam in t.values() for kind in fam.values() for r in kind.values()]
    assert len(rows) == 24
    assert all(r["agrees"] for r in rows)


def test_riemann_mesh():
    rows = list(csv.DictReader(io.StringIO(epdyn.riemann(0.06, 9))))
    assert len(rows) == 81


def test_errors():
    with pytest.raises(ValueError, match="loop.radius"):
        epdyn.run({"loop": {"radius": -1}})
    with pytest.raises(ValueError):
        epdyn.preset("trajectory-9")
    with pytest.raises(epdyn.NumericError):
        epdyn.vorticity({"loop": {"j_center": 0.09, "theta0": 3.141592653589793}})

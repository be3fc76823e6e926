import math

import numpy as np
import pytest

import ftlab


def test_systems():
    names = ftlab.list_systems()
    assert "p-system-gamma2" in names
    info = ftlab.system_info("p-system-gamma2")
    assert info["has_entropy"]
    with pytest.raises(ftlab.Error):
        ftlab.system_info("nope")


def test_eigensystem_psystem():
    e = ftlab.eigensystem("p-system-gamma2", [1.0, 0.0])
    assert e["lambda"][0] == pytest.approx(-math.sqrt(2))
    assert e["lambda"][1] == pytest.approx(math.sqrt(2))


def test_burgers_shock_speed():
    state, sigma = ftlab.shock_curve("decoupled-burgers", [0.1, 0.0], 1, 0.05)
    assert state[0] == pytest.approx(0.05)
    assert sigma == pytest.approx(0.075)


def test_riemann_and_tracking():
    fan = ftlab.solve_riemann("decoupled-burgers", 1e-3, [0.1, 0.0], [0.0, 0.0])
    assert len(fan["waves"]) == 1
    assert fan["waves"][0]["kind"] == "shock"
    s = ftlab.Solution("decoupled-burgers", 1e-4, [0.3, 0.0], [(0.0, [0.2, 0.0]), (0.1, [0.0, 0.0])])
    v0 = s.glimm()["V"]
    s.advance(2.0)
    assert s.time == 2.0
    assert s.interactions >= 1
    assert s.glimm()["V"] <= v0 + 1e-12
    assert np.allclose(s(-10.0), [0.3, 0.0])


def test_experiment_roundtrip(tmp_path):
    cfg = ftlab.default_config("riemann_oracle")
    cfg["params"]["count"] = 4
    rep = ftlab.run_experiment(cfg, str(tmp_path))
    assert rep["ok"]
    assert (tmp_path / rep["run_directory"].split("/")[-1] / "report.json").exists()
    with pytest.raises(ftlab.Error):
        ftlab.run_experiment({"experiment": "riemann_oracle", "T": -1})

import math

import numpy as np
import pytest

import gkdv


def test_soliton_travels_unchanged():
    grid = gkdv.Grid(512, 10.0)
    model = gkdv.Model(4, 1.0)
    u0 = gkdv.soliton(1.0, -3.0, model, grid)
    res = gkdv.run_direct(grid, u0, model, T=0.5, h=0.001)
    assert res["stop"] == "completed"
    exact = gkdv.soliton(1.0, -2.5, model, grid)
    assert np.max(np.abs(res["final"] - exact)) < 1e-8
    assert np.max(res["delta"]) < 1e-10
    assert res["t"][-1] == pytest.approx(0.5)


def test_invariants_and_derivative():
    grid = gkdv.Grid(128, 4.0)
    x = grid.nodes
    u = np.exp(-(x**2))
    du = gkdv.derivative(grid, u)
    assert np.max(np.abs(du + 2 * x * u)) < 1e-10
    inv = gkdv.invariants(grid, u, gkdv.Model(4, 1.0))
    assert inv["mass"] == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)
    assert inv["linf"] == pytest.approx(1.0)


def test_rescaled_soliton_is_stationary():
    grid = gkdv.Grid(1024, 20.0)
    model = gkdv.Model(4, 1.0)
    u0 = gkdv.soliton(1.0, 0.0, model, grid)
    res = gkdv.run_rescaled(grid, u0, model, tau_end=0.5, h=1e-3, stride=10)
    assert res["stop"] == "completed"
    # a carries round-off of third derivatives on 1024 nodes
    assert np.max(np.abs(res["a"])) < 1e-8
    assert res["final_L"] == pytest.approx(1.0, abs=1e-9)


def test_fits():
    t = np.linspace(0, 1.9, 1200)
    fit = gkdv.fit_blowup_time(t, (2 - t) ** -0.5)
    assert fit["t_star"] == pytest.approx(2.0, abs=1e-8)
    assert fit["alpha"] == pytest.approx(-0.5, abs=1e-8)
    assert gkdv.blowup_exponents(gkdv.Model(4, 0.1))["linf"] == -0.5
    with pytest.raises(gkdv.FitError):
        gkdv.fit_blowup_time(t, -np.ones_like(t), alpha=-0.5)


def test_hopf_time():
    assert round(gkdv.hopf_critical_time(1.0, gkdv.Model(4, 0.1)), 4) == 0.6007


def test_config_errors_and_run(tmp_path):
    with pytest.raises(gkdv.ConfigError):
        gkdv.run_config("model.n 4\n")
    with pytest.raises(ValueError):
        gkdv.Model(4, -1.0)
    doc = "\n".join([
        "mode = direct", "model.n = 4", "model.eps = 1", "grid.N = 2^8", "grid.D = 10",
        "stepping.T = 0.1", "stepping.Nt = 20", f"output.directory = {tmp_path}",
    ])
    out = gkdv.run_config(doc)
    assert out["status"] == 0
    assert "series.csv" in out["files"]
    assert (tmp_path / "series.csv").exists()

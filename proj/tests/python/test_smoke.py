"""Smoke checks of the python face: imports, limits, and the config runner."""

import json
import math

import pytest

import rhosolve


def test_dmpk_transparent_limit():
    # L -> 0 leaves every channel open: F = 1/(1 - gamma)
    F = rhosolve.dmpk_F(-1.0 + 0j, 1e-12)
    assert abs(F - 0.5) < 1e-9


def test_dmpk_diffusive_value():
    # gamma -> 0 probes the mean: F ~ Tbar = 1/(1 + 2 kl / pi) at kl = 5
    F = rhosolve.dmpk_F(1e-9 + 0j, 5.0)
    assert abs(F.real - 1.0 / (1.0 + 10.0 / math.pi)) < 1e-6


def test_transport_matches_dmpk_deep():
    Ft = rhosolve.transport_F(20.0, -1.0 + 0j, n_ang=32, n_x=300)
    Fd = rhosolve.dmpk_F(-1.0 + 0j, 20.0)
    assert Ft["converged"]
    assert abs(Ft["F"] - Fd) / abs(Fd) < 0.01


def test_two_stream_equals_dmpk():
    Fts = rhosolve.two_stream_F(5.0, -1.0 + 0j, n_x=2000, tol=1e-12)
    Fd = rhosolve.dmpk_F(-1.0 + 0j, 5.0)
    assert Fts["converged"]
    assert abs(Fts["F"] - Fd) < 1e-4


def test_qb_ballistic_limit():
    F = rhosolve.qb_F(1e-9, -1.0 + 0j)
    assert abs(F - 0.5) < 1e-6


def test_lattice_eigenvalues_bounded():
    ev = rhosolve.lattice_eigenvalues(4.5, 0.5, 2.0, seed=7)
    assert len(ev) > 0
    assert all(-1e-10 <= t <= 1.0 + 1e-10 for t in ev)
    assert ev == sorted(ev, reverse=True)


def test_lattice_seed_determinism():
    a = rhosolve.lattice_eigenvalues(4.5, 0.5, 2.0, seed=3)
    b = rhosolve.lattice_eigenvalues(4.5, 0.5, 2.0, seed=3)
    assert a == b


def test_run_config_dmpk(tmp_path):
    out = rhosolve.run_config(
        "solver = dmpk\nL_over_ell = 5\nt_points_low = 10\nt_points_high = 10\n",
        str(tmp_path),
    )
    assert len(out["T"]) == len(out["rho"]) > 0
    report = json.loads(out["report_json"])
    assert report["schema_version"] == 1
    assert (tmp_path / "dmpk_spectrum.csv").exists()
    assert (tmp_path / "dmpk_report.json").exists()


def test_config_rejects_unknown_key():
    with pytest.raises(rhosolve.ConfigError, match="typo_key"):
        rhosolve.run_config("solver = dmpk\nL_over_ell = 5\ntypo_key = 1\n", "")

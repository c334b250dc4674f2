import math

import numpy as np
import pytest

import contsym


def test_catalog_keys():
    assert "continuity" in contsym.system_keys()
    assert "galilei" in contsym.algebra_keys()
    assert contsym.algebra_members("galilei", 1)[:2] == ["P_t", "P_x"]


def test_canonical_round_trip():
    space = (["t", "x"], ["u"])
    for text in ["u_x*u + 2*u*u_x", "exp(u)*u_xx - 1/2*u_t", "(u + 1)^3"]:
        once = contsym.canonical(text, *space)
        assert contsym.canonical(once, *space) == once


def test_total_derivative():
    assert contsym.total_derivative("u^2", "x", ["t", "x"], ["u"]) == "2*u*u_x"
    with pytest.raises(ValueError):
        contsym.total_derivative("u", "y", ["t", "x"], ["u"])


def test_verify_symmetry_and_counterexample():
    ok = contsym.verify("continuity", 1, algebra="conformal", n=3)
    assert all(r["zero_at_all_points"] for r in ok["reports"])
    bad = contsym.verify("continuity", 1, generator="bad-gfield")
    assert bad["reports"][0]["nonzero_points"] > 0
    flt = contsym.verify("ag2", 3, algebra="ag2", n=2, mode="float")
    assert all(r["max_rel_residual"] < 1e-9 for r in flt["reports"])


def test_verify_rejects_unknown_system():
    with pytest.raises(contsym.ContsymError):
        contsym.verify("nope", 1)


def test_brackets_translations_commute():
    b = contsym.brackets("galilei", 1, 1, ["P_t", "P_x"])
    assert b["status"] == "closed"
    assert b["coefficients"] == [[["0", "0"], ["0", "0"]], [["0", "0"], ["0", "0"]]]


def test_free_evolution_conserves_mass():
    L, m = 20.0, 256
    u = contsym.gaussian_packet(L, m, x0=0.0, k0=2.0, w=1.0)
    assert u.dtype == np.complex128 and u.shape == (m,)
    assert contsym.mass(u, L) == pytest.approx(1.0, abs=1e-12)
    tr = contsym.evolve(u, L, t_final=0.5, steps_per_snapshot=50)
    assert tr["u"].shape == (len(tr["t"]), m)
    assert not tr["blew_up"]
    assert max(abs(mm - 1.0) for mm in tr["mass"]) < 1e-12


def test_boost_covariance_free():
    u = contsym.gaussian_packet(30.0, 512, w=1.0)
    assert contsym.boost_covariance_error(u, 30.0, 0.5, t_final=0.3) < 1e-10


def test_grid_and_boost_phase():
    x = np.asarray(contsym.grid_x(20.0, 64))
    assert x.shape == (64,) and math.isclose(x[1] - x[0], 2 * 20.0 / 64) and x[0] == -20.0
    u = contsym.gaussian_packet(20.0, 64)
    assert np.allclose(contsym.galilei_boost(u, 20.0, 0.0, 0.0), u)


def test_run_criterion():
    r = contsym.run_criterion(5, seed=1)
    assert r["id"] == 5 and r["status"] == "pass"
    assert 12 in contsym.criterion_ids()

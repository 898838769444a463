import math

import numpy as np
import pytest

import tfwlab


def test_constants():
    assert tfwlab.gamma_critical() == pytest.approx(4 * math.sqrt(math.pi), rel=1e-15)
    lam = 0.3
    assert tfwlab.c_lambda(5 / 3, lam) == pytest.approx(2.25 * math.pi**2 / (lam**2 * (1 - lam)), rel=1e-12)
    assert tfwlab.critical_excess_bound(10.0) == 0.0
    assert tfwlab.nam_particle_bound(2.0) == pytest.approx(2 * 5 / (4 * 0.8218))


def test_solve_tfw_small_grid():
    sol = tfwlab.solve_tfw(p=5 / 3, Z=1.0, n=1000)
    assert sol.r.shape == sol.psi.shape == (1000,)
    assert np.all(np.diff(sol.r) > 0)
    assert sol.psi[0] > sol.psi[-1] > 0
    assert 0.0 <= sol.Q < 1.0
    assert sol.euler_residual <= 1e-6
    rP = sol.r * sol.P
    assert np.all(np.diff(rP) <= 1e-6 * rP.max())
    assert rP[-1] >= sol.Q - 1e-4
    e = sol.energies
    assert 3 * e["T"] <= e["Aterm"]


def test_solution_round_trip(tmp_path):
    sol = tfwlab.solve_tfw(n=1000)
    path = str(tmp_path / "sol.csv")
    sol.save(path)
    back = tfwlab.load_tfw(path)
    assert np.array_equal(back.psi, sol.psi)
    assert back.N == sol.N


def test_bound_at_five_thirds():
    b = tfwlab.compute_B(5 / 3)
    assert b["B"] == pytest.approx(270.74, rel=1e-3)
    assert b["branch"] in ("F", "G")


def test_verify_subset():
    sol = tfwlab.solve_tfw(n=1000)
    reports = tfwlab.verify(sol, "virial,lemma_g1")
    assert [r["name"] for r in reports] == ["lemma_g1", "virial"]
    assert all(r["pass"] for r in reports)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        tfwlab.solve_tfw(p=0.9)
    with pytest.raises(ValueError):
        tfwlab.compute_B(1.4)

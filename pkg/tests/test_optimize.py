import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from transco import DomainError, optimize
from transco.optimize import NMOptions, SweepAxis, SweepGrid, nelder_mead, nelder_mead_restarts


def neg_rosen(x):
    return -((1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2)


def test_nm_rosenbrock():
    r = nelder_mead(neg_rosen, [-1.2, 1.0], opts=NMOptions(xtol=1e-9, ftol=1e-14, max_evals=5000))
    np.testing.assert_allclose(r.params_opt, [1.0, 1.0], atol=1e-4)
    assert r.converged


def test_nm_quadratic_1d():
    r = nelder_mead(lambda x: -(x[0] - 3.0) ** 2, [0.0])
    assert r.params_opt[0] == pytest.approx(3.0, abs=1e-5)


def test_nm_bounds_respected():
    r = nelder_mead(lambda x: x[0] + x[1], [0.0, 0.0], bounds=[(-1, 1), (-2, 0.5)])
    assert -1 <= r.params_opt[0] <= 1 and -2 <= r.params_opt[1] <= 0.5
    np.testing.assert_allclose(r.params_opt, [1.0, 0.5], atol=1e-4)


def test_nm_eval_cap():
    r = nelder_mead(neg_rosen, [-1.2, 1.0], opts=NMOptions(max_evals=30))
    assert r.n_evals <= 30 + 2 + 2 + 1 and not r.converged


def test_nm_bad_start():
    with pytest.raises(DomainError):
        nelder_mead(neg_rosen, [math.nan, 0.0])


def test_restart_points_deterministic():
    a = optimize.restart_points([0.0, 1.0], 4, 99, 0.3)
    b = optimize.restart_points([0.0, 1.0], 4, 99, 0.3)
    np.testing.assert_array_equal(np.array(a), np.array(b))
    c = optimize.restart_points([0.0, 1.0], 4, 100, 0.3)
    assert not np.array_equal(np.array(a), np.array(c))


def bumpy(x):
    return math.cos(3 * x[0]) * math.exp(-0.05 * x[0] ** 2) + 0.1 * math.sin(7 * x[1]) - 0.01 * x[1] ** 2


@given(seed=st.integers(0, 2**63), restarts=st.integers(1, 5))
def test_restart_dominance(seed, restarts):
    x0 = [1.3, -0.7]
    single = nelder_mead(bumpy, x0)
    multi = nelder_mead_restarts(bumpy, x0, None, None, restarts, seed)
    assert multi.objective_opt >= single.objective_opt - 1e-15
    again = nelder_mead_restarts(bumpy, x0, None, None, restarts, seed)
    np.testing.assert_array_equal(multi.params_opt, again.params_opt)


def test_result_serialization():
    r = nelder_mead(lambda x: -(x[0] ** 2), [1.0])
    r.names = ("a",)
    d = r.as_dict()
    assert d["names"] == ["a"] and isinstance(d["objective_opt"], float)
    assert r.param("a") == r.params_opt[0]
    assert '"n_evals"' in r.to_json()


def test_sweep_axis_checks():
    with pytest.raises(DomainError):
        SweepAxis("x", 0, 1, 1)
    with pytest.raises(DomainError):
        SweepAxis("x", 0, 1, 3, "cubic")
    with pytest.raises(DomainError):
        SweepAxis("x", 0, 1, 3, "log")
    np.testing.assert_allclose(SweepAxis("x", 1, 100, 3, "log").values(), [1, 10, 100])


def test_sweep_order_and_threads(tmp_path):
    grid = SweepGrid(
        (SweepAxis("var_over_nbar", 0.6, 1.2, 4), SweepAxis("tau_sqrt_nbar", 1.4, 1.7, 3)),
        "jcm_full_sphere",
        {"nbar": 20.0, "Theta": math.pi / 2, "n_max": 120},
    )
    a = optimize.sweep(grid, 1)
    b = optimize.sweep(grid, 4)
    assert a == b
    np.testing.assert_allclose([r[:2] for r in a][:4], [(0.6, 1.4), (0.6, 1.55), (0.6, 1.7), (0.8, 1.4)])
    p1 = optimize.write_sweep_csv(tmp_path / "a.csv", grid, a)
    p2 = optimize.write_sweep_csv(tmp_path / "b.csv", grid, b)
    assert p1.read_bytes() == p2.read_bytes()


def test_sweep_unknown_objective():
    with pytest.raises(DomainError):
        optimize.sweep(SweepGrid((SweepAxis("x", 0, 1, 2),), "nope"))


def test_grid_argmax_tie_break():
    assert optimize.grid_argmax([3.0, 1.0, 2.0], [0.5, 0.5, 0.1]) == 1


def test_fig3_frozen_optimum():
    r = optimize.fig3_optimum()
    assert r.param("var") / 20 == pytest.approx(0.87938, abs=2e-4)
    curve = optimize.fig3_curve()
    assert len(curve) == 50
    i = optimize.grid_argmax([c[0] for c in curve], [c[1] for c in curve])
    assert curve[i][0] == pytest.approx(0.8755102, abs=1e-6)


def test_optimize_jcm_free_time():
    r = optimize.optimize_jcm(20.0, math.pi / 2, 400)
    assert r.names == ("var", "tau")
    assert 0.87 < r.param("var") / 20 < 0.93


def test_fig4_single_theta_law():
    (row,) = optimize.fig4_rows(500.0, np.array([math.pi / 2]))
    from transco.fockcore import sinc

    assert row[2] == pytest.approx(sinc(math.pi / 4), rel=0.01)
    assert row[5] == pytest.approx(sinc(math.pi / 4) / math.sqrt(2), rel=0.01)
    assert row[6] == pytest.approx(math.pi / 2, abs=0.05)


def test_fig6_small_grid():
    rows = optimize.fig6_rows((50.0,), n_theta=4)
    assert all(r[4] >= 0 for r in rows)
    assert [r[4] for r in rows] == sorted(r[4] for r in rows)


def test_tcm_optimum_j2():
    r = optimize.optimize_tcm(100.0, 2, restarts=2)
    assert r.param("var") == pytest.approx(2 * 100 / math.pi, rel=0.05)
    assert r.param("tau") * 10 == pytest.approx(math.pi / 2, rel=0.05)


def test_impurity_floor_frozen():
    rows = optimize.impurity_floor((20.0,))
    assert rows[0][1] == pytest.approx(1.07e-5, rel=0.02)
    assert rows[0][1] > 1e-6


def test_objectives_registry():
    assert set(optimize.OBJECTIVES) == {"jcm_full_sphere", "jcm_fixed_phi", "tcm_exact", "tcm_approx", "tcm_impurity"}
    with pytest.raises(DomainError):
        optimize.jcm_objective(10.0, 10.0, 0.5, 1.0, 60, mode="half")

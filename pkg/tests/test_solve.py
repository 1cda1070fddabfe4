import math

import numpy as np
import pytest
from conftest import one_var, two_block

from gaugekit.dual import DualPoint, dual_slack
from gaugekit.errors import DimensionTooLarge, Infeasible
from gaugekit.gauges import PNorm
from gaugekit.model import BlockPartition, Problem, VectorGauge
from gaugekit.solve import (extract_kkt, oracle_solve_primal, slater_probe, solve_dual_subgradient,
                            solve_lp)


def test_oracle_examples():
    res = oracle_solve_primal(one_var(), box=3.0)
    assert res.point == pytest.approx([1]) and res.objective == pytest.approx(1)
    bad = one_var(A=[[1.0], [-1.0]], b=[0.0, 1.0])
    assert oracle_solve_primal(bad).status == "Infeasible"
    free = one_var(A=None, b=None)
    res = oracle_solve_primal(free, box=2.0)
    assert res.objective == pytest.approx(0, abs=1e-12) and res.point == pytest.approx([0], abs=1e-12)


def test_oracle_dimension_limit():
    gauge = VectorGauge(BlockPartition.contiguous([5]), [PNorm(2, 5)])
    with pytest.raises(DimensionTooLarge):
        oracle_solve_primal(Problem.build(gauge), grid_points_per_dim=11)
    with pytest.raises(DimensionTooLarge):
        oracle_solve_primal(one_var(), grid_points_per_dim=301)


def test_subgradient_examples():
    res = solve_dual_subgradient(one_var())
    assert res.point.u == pytest.approx([1], abs=1e-4) and res.objective == pytest.approx(1, abs=1e-4)
    zero = two_block(A=[[1, 0, 1]], b=[0], H=[[0, 1, 0]], K=[[0, 0]], p=[0])
    res = solve_dual_subgradient(zero)
    assert res.objective == pytest.approx(0, abs=1e-9)


def test_two_block_strong_duality():
    prob = two_block(A=[[1, 2, -1]], b=[1.5], c=[0.2, 0.0, -0.3], H=[[0, 1, 1]], K=[[0.5, 0]], p=[2])
    dual = solve_dual_subgradient(prob)
    primal = oracle_solve_primal(prob, box=4.0)
    assert abs(dual.objective - primal.objective) <= 1e-3
    # dual iterates are feasible to FEAS_TOL = 1e-8, so weak duality holds to that order
    assert dual.objective <= primal.objective + 1e-7


def test_best_so_far_monotone():
    prob = two_block(A=[[1, 2, -1]], b=[1.5], c=[0.2, 0.0, -0.3])
    res = solve_dual_subgradient(prob, iters=200, restarts=4)
    hist = res.info["best_by_restart"]
    assert all(b >= a for a, b in zip(hist, hist[1:]))
    assert dual_slack(prob, res.point).feasible


def test_subgradient_deterministic():
    prob = two_block(A=[[1, 2, -1]], b=[1.5], c=[0.2, 0.0, -0.3])
    a = solve_dual_subgradient(prob, iters=200, restarts=3, seed=4)
    b = solve_dual_subgradient(prob, iters=200, restarts=3, seed=4)
    assert np.array_equal(a.point.u, b.point.u) and a.objective == b.objective


def test_harmonic_schedule_runs():
    # a/(1+t) with a = 1/rho is slow: steps sum to about ln(T)/rho per restart
    res = solve_dual_subgradient(one_var(), schedule="harmonic", iters=2000, restarts=2, refine_iters=0)
    hist = res.info["best_by_restart"]
    assert 0 < hist[0] <= hist[1] == res.objective <= 1 + 1e-9


def test_lp_examples():
    res = solve_lp([-1, -1], A_ub=np.eye(2), b_ub=[1, 1], bounds=(0, None))
    assert -res.objective == pytest.approx(2)
    assert res.objective == pytest.approx(res.dual_objective, abs=1e-8)
    with pytest.raises(Infeasible):
        solve_lp([1, 0], A_eq=[[1, 1], [1, 1]], b_eq=[0, 1])


def test_lp_duality_self_check(rng):
    for _ in range(20):
        A = rng.normal(size=(3, 5))
        x0 = rng.uniform(0, 1, size=5)
        res = solve_lp(rng.uniform(0.1, 1, size=5), A_eq=A[:2], b_eq=A[:2] @ x0,
                       A_ub=A[2:], b_ub=A[2:] @ x0 + 0.5, bounds=(0, None))
        assert res.objective == pytest.approx(res.dual_objective, abs=1e-8)
        assert res.residual <= 1e-9


def test_slater_probe():
    prob = one_var(A=None, b=None, H=[[1.0]], K=[[1.0]], p=[1.0])
    x, s, ok = slater_probe(prob)
    assert ok and s > 0.9
    tight = one_var(A=None, b=None, H=[[0.0]], K=[[1.0]], p=[0.0])
    assert not slater_probe(tight)[2]


def test_extract_kkt_one_var():
    ext = extract_kkt(one_var(), DualPoint([1.0], []))
    assert ext.kkt.lam == pytest.approx([1]) and ext.residual.max <= 1e-12


def test_extract_kkt_infinity_norm_face():
    gauge = VectorGauge(BlockPartition.contiguous([2]), [PNorm(math.inf, 2)])
    prob = Problem.build(gauge, c=[0, 0], d=[1], A=[[1, 1]], b=[1])
    res = solve_dual_subgradient(prob)
    ext = extract_kkt(prob, res.point)
    assert ext.residual.max <= 1e-8
    assert ext.kkt.lam == pytest.approx([0.5], abs=1e-8)

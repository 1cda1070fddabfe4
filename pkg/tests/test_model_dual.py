import math

import numpy as np
import pytest
from conftest import one_var, two_block

from gaugekit.certify import lagrangian_value
from gaugekit.dual import (DualPoint, build_double_dual, dual_objective, dual_slack, dualize)
from gaugekit.errors import DimensionMismatch
from gaugekit.gauges import ConeIndicator, Orthant, PNorm
from gaugekit.instances import random_instance, sample_dual_feasible, sample_primal_feasible
from gaugekit.model import (BlockPartition, PrimalPoint, Problem, VectorGauge, batch_objective,
                            primal_feasibility, primal_objective)
from gaugekit.solve import oracle_solve_epigraph, oracle_solve_primal


# --- model

def test_partition_invariants():
    with pytest.raises(ValueError):
        BlockPartition(([0, 1], [1]))
    with pytest.raises(ValueError):
        BlockPartition(([0], [2]))
    with pytest.raises(ValueError):
        BlockPartition(([0], []))
    part = BlockPartition(([2, 0], [1]))
    assert part.n == 3 and part.sizes == [2, 1]
    x = np.array([1.0, 2.0, 3.0])
    assert np.allclose(part.assemble(part.split(x)), x)


def test_objective_examples():
    prob = one_var()
    assert primal_objective(prob, [1.0]) == 1
    assert primal_objective(prob, [0.0]) == 0
    gauge = VectorGauge(BlockPartition.contiguous([2]), [ConeIndicator(Orthant(2))])
    cone_prob = Problem.build(gauge, c=[1, 1], d=[1])
    assert primal_objective(cone_prob, [1, -1]) == math.inf


def test_feasibility_examples():
    prob = one_var()
    rep = primal_feasibility(prob, [1.0])
    assert rep.eq_residual == 0 and rep.feasible
    rep = primal_feasibility(prob, [0.0])
    assert rep.eq_residual == 1 and not rep.feasible
    ineq = one_var(A=None, b=None, H=[[0.0]], K=[[1.0]], p=[2.0])
    assert primal_feasibility(ineq, [3.0]).ineq_violation == pytest.approx(1)


def test_kind_and_flags():
    gauge = VectorGauge(BlockPartition.contiguous([1]), [PNorm(2, 1)])
    with pytest.raises(ValueError):
        Problem.build(gauge, A=[[1]], b=[1], B=[[1]])
    pho = Problem.build(gauge, A=[[1]], b=[1], B=[[1]], kind="pho")
    assert pho.is_convex
    assert not one_var(d=[-1.0]).is_convex
    assert one_var().assumption2() == [True]
    with pytest.raises(DimensionMismatch):
        Problem.build(gauge, c=[1, 2])


def test_empty_constraint_blocks():
    gauge = VectorGauge(BlockPartition.contiguous([2]), [PNorm(2, 2)])
    prob = Problem.build(gauge, c=[1.0, 0.0], d=[2.0])
    assert prob.k == 0 and prob.l == 0
    assert primal_feasibility(prob, [5, 5]).feasible
    assert dual_objective(prob, DualPoint.zeros(prob)) == 0


def test_objective_convex_along_segments(rng):
    for _ in range(20):
        inst = random_instance(rng)
        X = sample_primal_feasible(inst, rng, 10)
        f = batch_objective(inst.prob, X)
        for i in range(9):
            th = rng.uniform()
            mid = batch_objective(inst.prob, (th * X[i] + (1 - th) * X[i + 1])[None])[0]
            assert mid <= th * f[i] + (1 - th) * f[i + 1] + 1e-9


def test_feasibility_scale_consistency(rng):
    gauge = VectorGauge(BlockPartition.contiguous([2, 1]), [PNorm(2, 2), PNorm(1, 1)])
    prob = Problem.build(gauge, H=rng.normal(size=(2, 3)), K=[[1, 0.5], [0, 1]], p=[0, 0])
    for _ in range(200):
        x = rng.normal(size=3)
        if primal_feasibility(prob, x).feasible:
            assert primal_feasibility(prob, 3.7 * x).feasible


# --- dual

def test_dual_objective_examples():
    prob = one_var()
    assert dual_objective(prob, DualPoint([0.5], [])) == 0.5
    assert dual_objective(prob, DualPoint([0.0], [])) == 0
    gauge = VectorGauge(BlockPartition.contiguous([1]), [PNorm(2, 1)])
    p2 = Problem.build(gauge, A=[[1], [0]], b=[1, 1], H=[[0]], p=[2])
    assert dual_objective(p2, DualPoint([1, 0], [0.5])) == 0


def test_dual_slack_examples():
    prob = one_var()
    ds = dual_slack(prob, DualPoint([1.0], []))
    assert ds.alpha[0] == 1 and ds.polar_vals[0] == 1 and ds.slack[0] == 0 and ds.feasible
    ds = dual_slack(prob, DualPoint([2.0], []))
    assert ds.slack[0] == -1 and not ds.feasible
    ds = dual_slack(prob, DualPoint([0.0], []))
    assert ds.slack[0] == 1 and ds.feasible


def test_pho_slack_includes_B():
    gauge = VectorGauge(BlockPartition.contiguous([1]), [PNorm(2, 1)])
    pho = Problem.build(gauge, A=[[1]], b=[1], B=[[0.5]], d=[1], kind="pho")
    ds = dual_slack(pho, DualPoint([1.0], []))
    assert ds.beta[0] == pytest.approx(0.5) and ds.slack[0] == pytest.approx(-0.5)


def test_dualize_uses_polars():
    prob = two_block()
    dp = dualize(prob)
    assert isinstance(dp.polar.specs[0], PNorm) and dp.polar.specs[0].p == 2
    assert dp.polar.specs[1].p == math.inf


def test_slack_concave(rng):
    for _ in range(10):
        prob = random_instance(rng).prob
        for _ in range(20):
            a = DualPoint(rng.normal(size=prob.k), np.abs(rng.normal(size=prob.l)))
            b = DualPoint(rng.normal(size=prob.k), np.abs(rng.normal(size=prob.l)))
            mid = DualPoint((a.u + b.u) / 2, (a.v + b.v) / 2)
            sa, sb, sm = (dual_slack(prob, z).slack for z in (a, b, mid))
            assert np.all(sm >= (sa + sb) / 2 - 1e-12)


def test_weak_duality_sampled(rng):
    for _ in range(10):
        inst = random_instance(rng)
        X = sample_primal_feasible(inst, rng, 20)
        f = batch_objective(inst.prob, X)
        for dp in sample_dual_feasible(inst.prob, rng, 20):
            assert np.all(f >= dual_objective(inst.prob, dp) - 1e-9)


def test_double_dual_examples():
    prob = one_var()
    ep = build_double_dual(prob)
    res = oracle_solve_epigraph(ep, box=3.0)
    assert res.objective == pytest.approx(1, abs=1e-6)
    # d = 0, K = 0: same optimum
    p0 = two_block(A=[[1, 1, 1]], b=[1], c=[0.3, -0.1, 0.2], d=[0, 0],
                   H=-np.eye(3), K=np.zeros((3, 2)), p=[1, 1, 1])
    r1 = oracle_solve_primal(p0, box=6.0)
    r2 = oracle_solve_epigraph(build_double_dual(p0), box=6.0)
    assert r1.objective == pytest.approx(-0.1 * 3 - 0.3 - 0.2, abs=1e-6)
    assert r1.objective == pytest.approx(r2.objective, abs=1e-6)
    # (x*, G(x*)) is feasible for the epigraph form with equal objective
    x = np.array([1.0])
    z = np.concatenate([x, prob.gauge.eval(x)])
    assert ep.violation(z[None])[0] == 0
    assert ep.objective(z) == primal_objective(prob, x)


def test_double_dual_value_equivalence(rng):
    for _ in range(3):
        inst = random_instance(rng, n_max=3, l_max=1, k_max=1)
        r1 = oracle_solve_primal(inst.prob, box=inst.box)
        r2 = oracle_solve_epigraph(build_double_dual(dualize(inst.prob)), box=inst.box)
        if r2.info["free_dims"] > 4:
            continue
        assert r1.objective == pytest.approx(r2.objective, abs=1e-6)


def test_lagrangian_examples():
    prob = one_var()
    assert lagrangian_value(prob, [0.0], DualPoint([1.0], [])) == 1
    assert lagrangian_value(prob, [1.0], DualPoint([1.0], [])) == 1
    assert lagrangian_value(prob, [0.7], DualPoint([0.0], [])) == primal_objective(prob, [0.7])
    assert PrimalPoint.at(prob, [2.0]).gvals[0] == 2

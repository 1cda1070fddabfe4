import math

import numpy as np
import pytest

from gaugekit.dual import DualPoint
from gaugekit.errors import NegativeFunctionValueDetected
from gaugekit.gauges import PNorm
from gaugekit.model import BlockPartition, Problem, VectorGauge
from gaugekit.perspective import (AffinePlus, ConvexQuadratic, GaugeWrapped, PerspectiveGauge,
                                  build_perspective_dual, build_perspective_problem,
                                  convex_from_dict, decompose, eval_perspective,
                                  quad_persp_polar_numeric)
from gaugekit.solve import oracle_solve_primal

SQUARE = ConvexQuadratic([[1.0]], [0.0], 0.0)


def quad_problem(f=SQUARE, d=1.0, A=((1.0,),), b=(1.0,), c=(0.0,)) -> Problem:
    gauge = VectorGauge(BlockPartition.contiguous([f.dim]), [f])
    return Problem.build(gauge, c=c, d=[d], A=A, b=b, kind="convex")


def random_quadratic(rng, n):
    M = rng.normal(size=(n, n))
    f = ConvexQuadratic(M @ M.T + 0.05 * np.eye(n), rng.normal(size=n), 0.0)
    return ConvexQuadratic(f.Q, f.q, -f.min_value() + abs(rng.normal()))


def test_decompose_examples():
    dec = decompose(SQUARE, [0.0])
    assert dec.eta == pytest.approx([0]) and dec.const == 0
    dec = decompose(SQUARE, [1.0])
    assert dec.eta == pytest.approx([2]) and dec.const == pytest.approx(-1)
    h = dec.nonneg_part
    for x in np.linspace(-3, 3, 13):
        assert float(h.eval([x])) == pytest.approx((x - 1) ** 2)
    aff = AffinePlus([2.0], 5.0)   # affine where a@x + r > 0
    dec = decompose(aff, [0.0])
    assert float(dec.nonneg_part.eval([0.5])) == pytest.approx(0)


def test_decomposition_identity(rng):
    for _ in range(20):
        n = int(rng.integers(1, 4))
        f = random_quadratic(rng, n)
        z = rng.normal(size=n)
        dec = decompose(f, z)
        X = rng.normal(size=(1000, n)) * 3
        lin = X @ dec.eta + dec.const
        assert np.allclose(np.asarray(f.eval(X)), np.asarray(dec.nonneg_part.eval(X)) + lin,
                           atol=1e-12 * (1 + np.abs(lin).max()) * 100)
        assert float(dec.nonneg_part.eval(z)) == pytest.approx(0, abs=1e-12)
        assert np.min(dec.nonneg_part.eval(X)) >= -1e-12


def test_eval_perspective_examples():
    pg = PerspectiveGauge(SQUARE)
    assert eval_perspective(pg, [2.0], 1.0) == 4
    assert eval_perspective(pg, [2.0], 2.0) == 2
    assert eval_perspective(pg, [1.0], 0.0) == math.inf
    assert eval_perspective(pg, [0.0], 0.0) == 0
    assert eval_perspective(pg, [1.0], -1.0) == math.inf
    wrapped = PerspectiveGauge(GaugeWrapped(PNorm(1, 2)))
    assert eval_perspective(wrapped, [1.0, -2.0], 0.0) == 3


def test_recession_of_flat_quadratic():
    f = ConvexQuadratic([[1.0, 0.0], [0.0, 0.0]], [0.0, 2.0], 1.0)
    assert float(f.recession([0.0, 1.0])) == 2
    assert float(f.recession([1.0, 0.0])) == math.inf


def test_perspective_is_a_gauge(rng):
    for _ in range(10):
        n = int(rng.integers(1, 4))
        pg = PerspectiveGauge(random_quadratic(rng, n))
        Z = np.column_stack([rng.normal(size=(200, n)), rng.uniform(0.01, 3, size=200)])
        t = rng.uniform(0.01, 10, size=200)
        v = np.asarray(pg.eval(Z))
        assert np.all(v >= 0)
        assert np.allclose(np.asarray(pg.eval(Z * t[:, None])), t * v, rtol=1e-10)
        th = rng.uniform(size=199)
        mid = np.asarray(pg.eval(th[:, None] * Z[:-1] + (1 - th[:, None]) * Z[1:]))
        assert np.all(mid <= th * v[:-1] + (1 - th) * v[1:] + 1e-9 * (1 + np.abs(v[1:])))
        assert float(pg.eval(np.zeros(n + 1))) == 0


def test_quadratic_polar_closed_form_vs_numeric(rng):
    for _ in range(100):
        n = int(rng.integers(1, 4))
        f = random_quadratic(rng, n)
        for h in (f, decompose(f, rng.normal(size=n)).nonneg_part):
            y, w = rng.normal(size=n), 3 * rng.normal()
            a = PerspectiveGauge(h).polar(np.append(y, w))
            if math.isfinite(a):
                assert a == pytest.approx(quad_persp_polar_numeric(h, y, w), rel=1e-6, abs=1e-6)


def test_polar_defining_sup(rng):
    # sampled points of the lifted unit ball never beat the polar value
    for _ in range(10):
        n = int(rng.integers(1, 3))
        pg = PerspectiveGauge(random_quadratic(rng, n))
        Z = np.column_stack([rng.normal(size=(2000, n)) * 2, rng.uniform(0, 2, size=2000)])
        g = np.asarray(pg.eval(Z))
        Z = Z[g <= 1] / np.maximum(g[g <= 1], 1e-300)[:, None].clip(max=1)
        y = np.append(rng.normal(size=n), -abs(rng.normal()) - 2)
        assert np.all(Z @ y <= pg.polar(y) + 1e-9)


def test_affine_and_gauge_polars():
    pg = PerspectiveGauge(AffinePlus([1.0], 1.0))
    # sup{y x + w z : max(0, x + z) <= 1, z >= 0} is finite only for y >= 0, w <= y
    assert pg.polar([1.0, 0.5]) == pytest.approx(1)
    assert pg.polar([-1.0, 0.0]) == math.inf
    wrapped = PerspectiveGauge(GaugeWrapped(PNorm(2, 2)))
    assert wrapped.polar([3.0, 4.0, -1.0]) == pytest.approx(5)
    assert wrapped.polar([3.0, 4.0, 1.0]) == math.inf


def test_build_examples():
    pp = build_perspective_problem(quad_problem())
    res = oracle_solve_primal(pp.lifted, box=3.0)
    assert res.objective == pytest.approx(1, abs=1e-9)
    assert pp.unlift(res.point)[0] == pytest.approx([1]) and pp.unlift(res.point)[1] == pytest.approx([1])
    lin = build_perspective_problem(quad_problem(d=0.0, c=(2.0,)))
    assert oracle_solve_primal(lin.lifted, box=3.0).objective == pytest.approx(2)
    assert [k for k, _ in pp.row_kinds] == ["eq", "pin"]


def test_lifted_objective_identity(rng):
    for _ in range(10):
        n = 3
        f, g = random_quadratic(rng, 2), random_quadratic(rng, 1)
        gauge = VectorGauge(BlockPartition.contiguous([2, 1]), [f, g])
        prob = Problem.build(gauge, c=rng.normal(size=n), d=[1.0, 0.5], A=rng.normal(size=(1, n)),
                             b=[0.3], kind="convex")
        pp = build_perspective_problem(prob)
        for x in rng.normal(size=(20, n)):
            direct = float(prob.c @ x + prob.d @ prob.gauge.eval(x))
            assert pp.lifted_objective(pp.lift(x)) == pytest.approx(direct, rel=1e-12, abs=1e-12)
        assert pp.lifted.A.shape == (2 + 1 - 1 + 1, n + 2)


def test_negative_block_needs_decomposition():
    neg = ConvexQuadratic([[1.0]], [0.0], -1.0)
    with pytest.raises(NegativeFunctionValueDetected):
        build_perspective_problem(quad_problem(f=neg))
    pp = build_perspective_problem(quad_problem(f=neg), anchors=[[0.5]])
    res = oracle_solve_primal(pp.lifted, box=3.0)
    assert res.objective + pp.offset == pytest.approx(0, abs=1e-9)
    assert pp.source_objective([1.0]) == pytest.approx(0)


def test_perspective_dual_examples(rng):
    pp = build_perspective_problem(quad_problem())
    pd = build_perspective_dual(pp)
    assert pd.objective([0.0], [], [0.0]) == 0
    assert pd.slack([0.0], [], [0.0]).feasible
    # weak duality on dual feasible points: polar of x^2/zeta at (u, w) is u^2/(-4w)
    for u in rng.normal(size=100) * 3:
        w = -u * u / 4 - abs(rng.normal())
        assert pd.slack([u], [], [w]).feasible
        assert pd.objective([u], [], [w]) <= 1 + 1e-12
    # the saturating point u = 2, w = -1 closes the gap
    assert pd.slack([2.0], [], [-1.0]).slack[0] == pytest.approx(0, abs=1e-12)
    assert pd.objective([2.0], [], [-1.0]) == pytest.approx(1)


def test_convex_serialization():
    for f in (SQUARE, AffinePlus([1.0, -1.0], 0.5), GaugeWrapped(PNorm(1.5, 2))):
        g = convex_from_dict(f.to_dict())
        x = np.array([0.3, -0.7])[: f.dim]
        assert float(g.eval(x)) == float(f.eval(x))
    pg = PerspectiveGauge(SQUARE)
    from gaugekit.gauges import gauge_from_dict
    assert float(gauge_from_dict(pg.to_dict()).eval([2.0, 2.0])) == 2

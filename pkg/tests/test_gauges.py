import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gaugekit.errors import Assumption5Violated, DimensionMismatch, SchemaError
from gaugekit.gauges import (ConeIndicator, GeneratedCone, Orthant, PNorm, PolyhedralCone,
                             PolyhedralGauge, Polar, Scaled, WeightedPNorm, eval, eval_polar,
                             gauge_from_dict, holder_product, polar_spec, support_argmax)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
P_VALUES = [1.0, 1.5, 2.0, 3.0, math.inf]


def catalogue(dim=3):
    w = np.linspace(0.5, 2.0, dim)
    return [PNorm(p, dim) for p in P_VALUES] + [
        WeightedPNorm(2.0, w), WeightedPNorm(1.0, w), WeightedPNorm(math.inf, w),
        Scaled(2.5, PNorm(1.0, dim)),
        PolyhedralGauge(np.vstack([np.eye(dim), -np.ones((1, dim))])),
    ]


# --- spec examples

def test_eval_examples():
    assert eval(PNorm(1, 2), [1, -2]) == 3
    for g in catalogue(2):
        assert eval(g, np.zeros(2)) == 0
    assert eval(ConeIndicator(Orthant(2)), [1, -1]) == math.inf


def test_polar_examples():
    assert eval_polar(PNorm(2, 2), [3, 4]) == pytest.approx(5)
    assert eval_polar(PNorm(1, 2), [3, -4]) == pytest.approx(4)
    orth = ConeIndicator(Orthant(2))
    assert eval_polar(orth, [-1, -2]) == 0
    assert eval_polar(orth, [1, 0]) == math.inf


def test_polyhedral_polar_by_lp():
    # g(x) = max(0, x1, x2): unit ball {x <= 1}, so sup 2x1 + 3x2 = 5 at (1, 1)
    g = PolyhedralGauge(np.eye(2))
    assert eval_polar(g, [2, 3]) == pytest.approx(5)
    grid = np.linspace(-3, 1, 401)
    X = np.array(np.meshgrid(grid, grid)).reshape(2, -1).T
    inside = X[eval(g, X) <= 1 + 1e-12]
    assert np.max(inside @ [2, 3]) == pytest.approx(5)


def test_support_argmax_examples():
    r = support_argmax(PNorm(2, 2), [3, 4])
    assert np.allclose(r.x_bar, [0.6, 0.8]) and r.on_unit_sphere
    assert np.allclose(support_argmax(PNorm(1, 2), [3, -4]).x_bar, [0, -1])
    for g in catalogue(2)[:-1]:
        r = support_argmax(g, [0, 0])
        assert np.all(r.x_bar == 0) and not r.on_unit_sphere


def test_argmax_tie_breaks():
    # l1 ties: lowest index; linf zeros: +1
    assert np.allclose(support_argmax(PNorm(1, 3), [2, -2, 1]).x_bar, [1, 0, 0])
    xb = support_argmax(PNorm(math.inf, 3), [0, -1, 0]).x_bar
    assert np.allclose(xb, [1, -1, 1])
    assert eval(PNorm(math.inf, 3), xb) == 1


def test_assumption5_flags():
    assert PNorm(2, 2).satisfies_assumption5
    assert Scaled(3, WeightedPNorm(1, [1, 2])).satisfies_assumption5
    assert not ConeIndicator(Orthant(2)).satisfies_assumption5
    assert not PolyhedralGauge(np.eye(2)).satisfies_assumption5
    assert PolyhedralGauge(np.array([[1, 0], [0, 1], [-1, -1.0]])).satisfies_assumption5
    with pytest.raises(Assumption5Violated):
        support_argmax(ConeIndicator(Orthant(2)), [1, 1])


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        eval(PNorm(2, 3), [1, 2])
    with pytest.raises(ValueError):
        PNorm(0.5, 2)


def test_cone_polars():
    M = np.array([[1.0, -1.0], [-1.0, -1.0]])
    cone = ConeIndicator(PolyhedralCone(M))
    pol = polar_spec(cone)
    # y = M^T lam, lam >= 0, lies in the polar cone
    for lam in np.random.default_rng(0).uniform(0, 1, size=(20, 2)):
        assert eval(pol, M.T @ lam) == 0
        assert eval_polar(cone, M.T @ lam) == 0
    assert eval_polar(cone, [0, 1]) == math.inf
    gen = ConeIndicator(GeneratedCone(np.eye(2)))
    assert eval(gen, [1, 2]) == 0 and eval(gen, [-1, 2]) == math.inf


def test_holder_product_convention():
    assert holder_product(0.0, math.inf) == math.inf
    assert holder_product(2.0, 3.0) == 6.0


def test_serialization_round_trip():
    specs = catalogue(3) + [ConeIndicator(Orthant(3)), Polar(PNorm(1.5, 3))]
    for g in specs:
        h = gauge_from_dict(g.to_dict())
        y = np.array([0.3, -1.2, 2.0])
        assert eval(h, y) == eval(g, y)
    with pytest.raises(SchemaError):
        gauge_from_dict({"family": "nope"})


# --- invariants

@settings(max_examples=60, deadline=None)
@given(arrays(float, 3, elements=finite), st.floats(0.01, 10))
def test_positive_homogeneity(x, t):
    for g in catalogue(3):
        assert eval(g, t * x) == pytest.approx(t * eval(g, x), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite))
def test_holder_and_polar_nonnegativity(x, y):
    for g in catalogue(3):
        gy = eval_polar(g, y)
        assert gy >= 0
        if math.isfinite(gy):
            assert eval(g, x) * gy >= x @ y - 1e-9 * (1 + abs(x @ y))


@settings(max_examples=60, deadline=None)
@given(arrays(float, 3, elements=finite))
def test_argmax_consistency(alpha):
    for g in catalogue(3)[:-1]:
        xb = support_argmax(g, alpha).x_bar
        assert eval(g, xb) <= 1 + 1e-12
        assert alpha @ xb == pytest.approx(eval_polar(g, alpha), rel=1e-9, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(arrays(float, 3, elements=finite))
def test_involution(x):
    for g in catalogue(3)[:-1]:
        assert eval_polar(polar_spec(g), x) == pytest.approx(eval(g, x), rel=1e-9, abs=1e-9)

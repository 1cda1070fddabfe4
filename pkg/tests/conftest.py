import numpy as np
import pytest

from gaugekit.gauges import PNorm
from gaugekit.model import BlockPartition, Problem, VectorGauge


def one_var(**kw) -> Problem:
    """min |x| s.t. x = 1 (optimum 1 at x = 1, dual optimum u = 1)."""
    gauge = VectorGauge(BlockPartition.contiguous([1]), [PNorm(1, 1)])
    data = dict(c=[0.0], d=[1.0], A=[[1.0]], b=[1.0])
    data.update(kw)
    return Problem.build(gauge, **data)


def two_block(A=None, b=None, c=None, d=None, H=None, K=None, p=None) -> Problem:
    """An l2 block of size 2 followed by an l1 block of size 1."""
    gauge = VectorGauge(BlockPartition.contiguous([2, 1]), [PNorm(2, 2), PNorm(1, 1)])
    return Problem.build(gauge, c=c, d=d if d is not None else [1.0, 1.0], A=A, b=b, H=H, K=K, p=p)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

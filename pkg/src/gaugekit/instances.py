"""Random convex gauge instances with a known strictly feasible point.

Each instance is bounded below by construction: the linear term of every
block is dominated by a fraction ``theta_i < 1`` of ``d_i g_i``, so
``(u, v) = 0`` is strictly dual feasible and the objective is coercive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gauges import PNorm
from .model import BlockPartition, Problem, VectorGauge, batch_objective

FAMILIES = {"l1": 1.0, "l2": 2.0, "linf": math.inf}


@dataclass
class Instance:
    prob: Problem
    slater_point: np.ndarray
    #: bound on every g_i(x*_i), hence on the dual multipliers
    gauge_bound: float
    #: half-width for the grid oracle window
    box: float


def random_instance(rng: np.random.Generator, n_max: int = 4, m_max: int = 3,
                    families=("l1", "l2", "linf"), k_max: int = 2, l_max: int = 2,
                    free_max: int | None = None, theta_max: float = 0.6, k_min: int = 0,
                    scale: float = 1.0) -> Instance:
    """Draw one convex instance with PNorm blocks.

    ``free_max`` caps ``n - k`` (the grid oracle's free coordinates).
    """
    while True:
        n = int(rng.integers(1, n_max + 1))
        m = int(rng.integers(1, min(m_max, n) + 1))
        k = int(rng.integers(0, min(k_max, n - 1) + 1)) if n > 1 else 0
        if k < k_min:
            continue
        if free_max is None or n - k <= free_max:
            break
    cuts = np.sort(rng.choice(np.arange(1, n), size=m - 1, replace=False)) if m > 1 else []
    sizes = np.diff(np.concatenate([[0], cuts, [n]])).astype(int)
    part = BlockPartition.contiguous(sizes)
    specs = [PNorm(FAMILIES[families[int(rng.integers(len(families)))]], s) for s in sizes]
    gauge = VectorGauge(part, specs)

    d = rng.uniform(0.5, 2.0, size=m)
    theta = rng.uniform(0.0, theta_max, size=m)
    c = np.zeros(n)
    for i, (spec, blk) in enumerate(zip(specs, part.blocks)):
        w = rng.normal(size=blk.size)
        c[blk] = -theta[i] * d[i] * w / spec.polar(w)

    x_s = scale * rng.normal(size=n) * 0.7
    ell = int(rng.integers(0, l_max + 1))
    A = rng.normal(size=(k, n))
    b = A @ x_s
    H = rng.normal(size=(ell, n))
    K = rng.uniform(0.0, 1.0, size=(ell, m))
    p = H @ x_s + K @ gauge.eval(x_s) + rng.uniform(0.2, 1.0, size=ell)
    prob = Problem.build(gauge, c=c, d=d, A=A, b=b, H=H, K=K, p=p)

    f_s = float(batch_objective(prob, x_s[None, :])[0])
    bound = float(np.max(f_s / ((1.0 - theta) * d)))
    box = math.sqrt(n) * bound + float(np.linalg.norm(x_s)) + 1.0
    return Instance(prob, x_s, bound, box)


def _bisect_rows(ok, base, D, iters=40):
    """Largest ``t in [0, 1]`` per row with ``ok(base + t D)`` (``ok`` is
    convex-set membership, batched over rows and true at ``t = 0``)."""
    lo = np.zeros(len(D))
    hi = np.ones(len(D))
    full = ok(base + D)
    lo[full] = 1.0
    todo = ~full
    for _ in range(iters):
        if not np.any(todo):
            break
        mid = 0.5 * (lo + hi)
        inside = ok(base + mid[:, None] * D)
        lo = np.where(todo & inside, mid, lo)
        hi = np.where(todo & ~inside, mid, hi)
    return lo


def sample_primal_feasible(inst: Instance, rng, count: int, spread: float = 1.5):
    """Feasible points on random segments from the Slater point.

    Moves along the null space of ``A`` and bisects back toward the Slater
    point until the inequalities hold (they are convex in ``x``).
    """
    from .model import batch_violation
    from .solve.oracle import affine_parametrization
    prob = inst.prob
    _, N = affine_parametrization(prob.A, prob.b, prob.n)
    if N.shape[1] == 0:
        return np.repeat(inst.slater_point[None, :], count, axis=0)
    D = rng.normal(size=(count, N.shape[1])) @ N.T * spread
    lo = _bisect_rows(lambda X: batch_violation(prob, X, equalities=False) <= 0,
                      inst.slater_point[None, :], D)
    t = lo * rng.uniform(0.0, 1.0, size=count)
    return inst.slater_point[None, :] + t[:, None] * D


def sample_dual_feasible(prob: Problem, rng, count: int, spread: float = 2.0):
    """Dual feasible points on random segments from the origin.

    The origin is strictly feasible for instances from :func:`random_instance`
    and the slack is concave, so bisection along each ray stays feasible.
    """
    from .dual import DualPoint
    k = prob.k
    D = np.hstack([rng.normal(size=(count, k)), np.abs(rng.normal(size=(count, prob.l)))]) * spread

    def ok(Y):
        U, V = Y[:, :k], Y[:, k:]
        alpha = U @ prob.A - V @ prob.H - prob.c
        beta = prob.d - U @ prob.B + V @ prob.K
        return np.all(beta - prob.gauge.polar(alpha) >= 0, axis=-1)

    lo = _bisect_rows(ok, np.zeros((1, k + prob.l)), D)
    Y = (lo * rng.uniform(0.0, 1.0, size=count))[:, None] * D
    return [DualPoint(y[:k], y[k:]) for y in Y]

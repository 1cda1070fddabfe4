"""Penalized projected subgradient ascent on the dual.

Maximizes the exact-penalty function

    F(u, v) = b@u - p@v - rho * sum_i max(0, polar_i(alpha_i) - beta_i)

over ``v >= 0``.  A maximizer of ``alpha_i @ x`` over the unit ball of
``g_i`` is a subgradient of the polar at ``alpha_i``, which gives the
ascent direction.  Blocks whose polar is an indicator (cone blocks) are not
penalized; after every step the iterate is pushed back into the linear
constraints ``alpha_i in C_i°`` by cyclic halfspace projections.
"""
from __future__ import annotations

import math

import numpy as np

from ..dual import DualPoint, alpha_beta, dual_slack
from ..errors import AssumptionViolated, PenaltyTooSmall
from ..gauges import ConeIndicator, Orthant, PolyhedralCone, GeneratedCone
from ..model import FEAS_TOL, Problem
from .oracle import SolveResult


def default_rho(prob: Problem) -> float:
    dn = float(np.max(np.abs(prob.d))) if prob.m else 0.0
    bn = float(np.max(np.abs(prob.b))) if prob.k else 0.0
    return 10.0 * (1.0 + dn + bn)


def _cone_halfspaces(prob: Problem):
    """Linear rows ``(a_u, a_v, rhs)`` with ``a_u@u + a_v@v <= rhs`` that
    encode ``alpha_i in C_i°`` for every cone block."""
    rows = []
    for i, spec in enumerate(prob.specs):
        if not isinstance(spec, ConeIndicator):
            continue
        cone = spec.cone
        if isinstance(cone, Orthant):
            R = np.eye(cone.dim)
        elif isinstance(cone, GeneratedCone):
            R = np.asarray(cone.R)
        elif isinstance(cone, PolyhedralCone):
            M = np.asarray(cone.M)
            if M.shape[0] != M.shape[1]:
                raise AssumptionViolated(
                    "dual solver handles polyhedral cones only with square invertible M")
            # C = {x : M x <= 0} is generated by the columns of -M^{-1}
            R = -np.linalg.inv(M).T
        else:  # pragma: no cover
            raise AssumptionViolated(f"unsupported cone {type(cone).__name__}")
        blk = prob.partition.blocks[i]
        for r in R:
            # alpha_i @ r <= 0  with  alpha = A^T u - H^T v - c
            rows.append((prob.A[:, blk] @ r, -(prob.H[:, blk] @ r), float(prob.c[blk] @ r)))
    return rows


def _project_halfspaces(U, V, rows, sweeps=50):
    for _ in range(sweeps):
        worst = 0.0
        for au, av, rhs in rows:
            excess = U @ au + V @ av - rhs
            nrm = au @ au + av @ av
            if nrm == 0:
                continue
            step = np.maximum(excess, 0.0) / nrm
            U -= step[:, None] * au
            V -= step[:, None] * av
            V = np.maximum(V, 0.0)
            worst = max(worst, float(np.max(excess)))
        if worst <= 1e-12:
            break
    return U, V


def _u_metric(prob: Problem) -> np.ndarray:
    """``(A A^T)^{-1}`` scaled to unit spectral radius, regularized.

    Stepping in ``u`` along ``Pu2 @ g`` equalizes how far each direction of
    ``A^T u`` moves, which matters when rows of ``A`` are nearly dependent.
    """
    k = prob.k
    if k == 0:
        return np.eye(0)
    w, Q = np.linalg.eigh(prob.A @ prob.A.T)
    w = np.maximum(w, 1e-8 * max(float(w.max()), 1e-300))
    inv = 1.0 / w
    inv /= inv.min()
    return (Q * inv) @ Q.T


class _PenalizedDual:
    """Value and one supergradient of the penalized dual at ``y = (u, v)``."""

    def __init__(self, prob: Problem, rho: float, tol: float):
        self.prob, self.rho, self.tol = prob, rho, tol
        self.penal = [i for i, s in enumerate(prob.specs) if not isinstance(s, ConeIndicator)]
        blocks = prob.partition.blocks
        self.Ab = [prob.A[:, blk] for blk in blocks]
        self.Hb = [prob.H[:, blk] for blk in blocks]
        self.calls = 0

    def __call__(self, y):
        prob, rho = self.prob, self.rho
        k = prob.k
        u, v = y[:k], y[k:]
        alpha, beta = alpha_beta(prob, u, v)
        gu = prob.b.copy()
        gv = -prob.p.copy()
        pen = 0.0
        feasible = True
        for i in self.penal:
            ai = alpha[prob.partition.blocks[i]]
            viol = float(prob.specs[i].polar(ai)) - beta[i]
            if viol > 0:
                pen += viol
                if viol > self.tol:
                    feasible = False
                xb = prob.specs[i].support_argmax_batch(ai[None, :])[0]
                gu -= rho * (self.Ab[i] @ xb + prob.B[:, i])
                gv -= rho * (-(self.Hb[i] @ xb) - prob.K[:, i])
        obj = float(prob.b @ u - prob.p @ v)
        self.calls += 1
        return obj - rho * pen, obj, feasible, np.concatenate([gu, gv])


def _refine(oracle, y0, k, ell, cone_rows, iters=300, rtol=1e-12):
    """Trust-region cutting planes on the penalized dual.

    Each step maximizes the piecewise-linear model built from all
    supergradients seen so far over a box around the incumbent; the box
    doubles after a successful step that reached its edge.  Yields every
    evaluated point as ``(y, F, obj, feasible)``.
    """
    from .lp import solve_lp
    center = np.asarray(y0, dtype=float).copy()
    Fc, obj, feas, g = oracle(center)
    yield center.copy(), Fc, obj, feas
    cuts_g, cuts_r = [g], [Fc - g @ center]
    delta = max(1.0, float(np.max(np.abs(center)))) if center.size else 1.0
    nv = k + ell
    for _ in range(iters):
        G = np.array(cuts_g)
        # variables (y, t); maximize t  <=>  minimize -t
        A_ub = np.hstack([-G, np.ones((len(G), 1))])
        b_ub = np.array(cuts_r)
        if cone_rows:
            rows = np.array([np.concatenate([au, av, [0.0]]) for au, av, _ in cone_rows])
            A_ub = np.vstack([A_ub, rows])
            b_ub = np.concatenate([b_ub, [rhs for *_, rhs in cone_rows]])
        lo = center - delta
        hi = center + delta
        lo[k:] = np.maximum(lo[k:], 0.0)
        bounds = list(zip(lo, hi)) + [(None, None)]
        cost = np.zeros(nv + 1)
        cost[-1] = -1.0
        try:
            res = solve_lp(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, raise_on_failure=False)
        except RuntimeError:
            break
        if res.status != "optimal":
            break
        y = res.x[:nv]
        pred = -res.objective - Fc
        if pred <= rtol * (1.0 + abs(Fc)):
            break
        F, obj, feas, g = oracle(y)
        yield y.copy(), F, obj, feas
        cuts_g.append(g)
        cuts_r.append(F - g @ y)
        if F >= Fc + 0.1 * pred:
            if np.max(np.abs(y - center)) >= 0.99 * delta:
                delta *= 2.0
            center, Fc = y, F


def solve_dual_subgradient(prob: Problem, rho: float | None = None, iters: int = 1000,
                           step: float | None = None, schedule: str = "normalized",
                           restarts: int = 12, seed: int = 0, tol: float = FEAS_TOL,
                           raise_on_infeasible: bool = True, shrink: float = 0.3,
                           precondition: bool = True, refine_iters: int = 300) -> SolveResult:
    """Maximize the penalized dual; return the best feasible iterate.

    ``schedule`` chooses the step rule within one run of ``iters`` steps:

    * ``"normalized"`` (default): move a distance ``a / sqrt(1 + t)`` along
      the normalized supergradient, ``a = 1`` unless ``step`` is given;
    * ``"harmonic"``: ``a / (1 + t)`` times the raw supergradient, ``a = 1/rho``;
    * ``"sqrt"``: ``a / sqrt(1 + t)`` times the raw supergradient.

    Restart 0 starts from the origin; restart ``r > 0`` starts from the best
    point so far plus a small random perturbation with ``a`` scaled by
    ``shrink**r``.  Randomness comes only from ``seed``.  With
    ``precondition`` the ``u`` step is taken in the metric ``(A A^T)^{-1}``.

    Plain subgradient steps crawl along shallow ridges of the dual, so the
    best point is handed to ``refine_iters`` trust-region cutting-plane steps
    that reuse the same supergradients (``refine_iters=0`` disables this).
    """
    if not prob.is_convex:
        raise AssumptionViolated("dual subgradient solver needs nonnegative d and K")
    rho = default_rho(prob) if rho is None else float(rho)
    if step is not None:
        a0 = float(step)
    else:
        a0 = 1.0 if schedule == "normalized" else 1.0 / rho
    rng = np.random.default_rng(seed)
    k, ell = prob.k, prob.l
    cone_rows = _cone_halfspaces(prob)
    oracle = _PenalizedDual(prob, rho, tol)
    Pu2 = _u_metric(prob) if precondition else np.eye(k)

    best_feas = (-math.inf, None)
    best_pen = (-math.inf, None)
    history = []
    total = 0

    def record(y, F, obj, feasible):
        nonlocal best_feas, best_pen
        if F > best_pen[0]:
            best_pen = (F, y.copy())
        if feasible and obj > best_feas[0]:
            best_feas = (obj, y.copy())

    for r in range(restarts):
        if r == 0 or best_pen[1] is None:
            y = np.zeros(k + ell)
        else:
            base = best_feas[1] if best_feas[1] is not None else best_pen[1]
            y = base + rng.normal(scale=a0 * shrink ** r, size=k + ell)
        a = a0 * shrink ** r
        U = y[None, :k].copy()
        V = np.maximum(y[None, k:], 0.0)
        if cone_rows:
            U, V = _project_halfspaces(U, V, cone_rows)
        for t in range(iters):
            y = np.concatenate([U[0], V[0]])
            F, obj, feasible, g = oracle(y)
            record(y, F, obj, feasible)
            gu, gv = g[:k], g[k:]
            if schedule == "harmonic":
                s = a / (1.0 + t)
            elif schedule == "sqrt":
                s = a / math.sqrt(1.0 + t)
            elif schedule == "normalized":
                gn = math.sqrt(float(gu @ Pu2 @ gu + gv @ gv))
                s = a / (math.sqrt(1.0 + t) * gn) if gn > 0 else 0.0
            else:
                raise ValueError(f"unknown step schedule {schedule!r}")
            U = U + s * (gu @ Pu2)[None, :]
            V = np.maximum(V + s * gv[None, :], 0.0)
            if cone_rows:
                U, V = _project_halfspaces(U, V, cone_rows)
            total += 1
        history.append(best_feas[0])

    refined = 0
    if refine_iters > 0 and best_pen[1] is not None and k + ell > 0:
        for y, F, obj, feasible in _refine(oracle, best_pen[1], k, ell, cone_rows, refine_iters):
            record(y, F, obj, feasible)
            refined += 1
        history.append(best_feas[0])

    info = {"rho": rho, "penalized": best_pen[0], "refine_steps": refined,
            "best_by_restart": history}
    if best_feas[1] is None:
        if raise_on_infeasible:
            raise PenaltyTooSmall(
                f"no dual feasible iterate found with rho = {rho:g}; try a larger penalty")
        y = best_pen[1]
        dp = DualPoint(y[:k], y[k:])
        return SolveResult(dp, best_pen[0], "IterLimit", total, info={**info, "feasible": False})
    y = best_feas[1]
    dp = DualPoint(y[:k], y[k:])
    ds = dual_slack(prob, dp, tol)
    info.update(feasible=ds.feasible, min_slack=ds.min_slack)
    return SolveResult(dp, best_feas[0], "IterLimit", total + refined, info=info)

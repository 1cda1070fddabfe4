"""Brute-force grid oracle for tiny instances.

Equality constraints are eliminated by writing ``x = x0 + N y`` with ``x0``
the least-norm solution of ``A x = b`` and ``N`` an orthonormal null-space
basis; the grid lives on the free coordinates ``y``.  After each pass the
window shrinks around the best feasible grid point (to a fixed number of
grid spacings on each side), so a handful of passes reaches fine resolution on convex
problems without enumerating a fine global grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from ..errors import DimensionTooLarge
from ..model import Problem, batch_objective, batch_violation

MAX_FREE_DIMS = 4
MAX_POINTS_PER_DIM = 201


@dataclass
class SolveResult:
    point: np.ndarray
    objective: float
    status: str
    iterations: int
    certificate: object = None
    info: dict = field(default_factory=dict)


@dataclass
class GridOutcome:
    x: np.ndarray | None
    value: float
    spacing: float
    lipschitz: float
    passes: int
    evaluations: int


def affine_parametrization(A, b, n, tol=1e-9):
    """``(x0, N)`` with ``{x : A x = b} = {x0 + N y}``, or ``None`` if inconsistent."""
    A = np.asarray(A, dtype=float).reshape(-1, n)
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[0] == 0:
        return np.zeros(n), np.eye(n)
    x0, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.max(np.abs(A @ x0 - b)) > tol * max(1.0, np.max(np.abs(b))):
        return None
    return x0, null_space(A)


def grid_minimize(objective, violation, x0, N, box, points_per_dim=21, passes=12,
                  max_points=200_000, feas_tol=0.0, zoom=None) -> GridOutcome:
    """Minimize ``objective(x0 + N y)`` over feasible grid points in ``y``.

    ``objective`` and ``violation`` act on row batches; a row is feasible
    when its violation is ``<= feas_tol``.  After each pass the window
    half-width becomes ``zoom`` grid spacings (default: a quarter of the
    grid, at least 2), recentred on the incumbent.
    """
    r = N.shape[1]
    if r > MAX_FREE_DIMS:
        raise DimensionTooLarge(f"{r} free coordinates; the grid oracle handles at most {MAX_FREE_DIMS}")
    if points_per_dim > MAX_POINTS_PER_DIM:
        raise DimensionTooLarge(f"at most {MAX_POINTS_PER_DIM} grid points per dimension")
    if r == 0:
        X = x0[None, :]
        ok = violation(X)[0] <= feas_tol
        val = float(objective(X)[0]) if ok else math.inf
        return GridOutcome(x0.copy() if ok else None, val, 0.0, 0.0, 1, 1)

    P = int(points_per_dim)
    if r > 0:
        P = min(P, max(5, int(math.floor(max_points ** (1.0 / r)))))
    P += (P + 1) % 2  # odd, so the window center is a grid point
    if zoom is None:
        zoom = max(2.0, (P - 1) / 8.0)
    offsets = np.linspace(-1.0, 1.0, P)
    unit = np.array(list(itertools.product(offsets, repeat=r)))

    center = np.zeros(r)
    half = float(box)
    best_y, best_val = None, math.inf
    evals = 0
    lip = 0.0
    spacing = 2.0 * half / (P - 1)
    done = 0
    for k in range(passes):
        Y = center + half * unit
        if best_y is not None:
            Y = np.vstack([best_y[None, :], Y])
        X = x0 + Y @ N.T
        vals = objective(X)
        feas = (violation(X) <= feas_tol) & np.isfinite(vals)
        evals += len(Y)
        done = k + 1
        spacing = 2.0 * half / (P - 1)
        if not np.any(feas):
            if best_y is None:
                # nothing feasible on the first pass: give up
                break
            half *= 0.5
            continue
        fv = np.where(feas, vals, np.inf)
        i = int(np.argmin(fv))
        if fv[i] < best_val or best_y is None:
            best_val, best_y = float(fv[i]), Y[i].copy()
        # local Lipschitz estimate from feasible neighbours of the incumbent
        dist = np.linalg.norm(Y - best_y, axis=1)
        near = feas & (dist > 0) & (dist <= 1.5 * spacing * math.sqrt(r))
        if np.any(near):
            lip = float(np.max(np.abs(fv[near] - best_val) / dist[near]))
        center = best_y
        half = zoom * spacing
        if half <= 1e-15 * (1.0 + float(np.max(np.abs(best_y)))):
            break
    if best_y is None:
        return GridOutcome(None, math.inf, spacing, 0.0, done, evals)
    return GridOutcome(x0 + N @ best_y, best_val, spacing, lip, done, evals)


def oracle_solve_primal(prob: Problem, box: float = 4.0, grid_points_per_dim: int = 201,
                        passes: int = 30, max_points: int = 200_000,
                        feas_tol: float = 0.0) -> SolveResult:
    """Best feasible point of a refining grid over ``{A x = b}``.

    The search window is ``[-box, box]`` in each free coordinate around the
    least-norm solution of ``A x = b``.  ``info["accuracy"]`` bounds the
    objective error by final spacing times the local Lipschitz estimate.
    """
    if np.any(prob.B):
        raise ValueError("grid oracle needs B = 0 (no gauge term in the equalities)")
    par = affine_parametrization(prob.A, prob.b, prob.n)
    if par is None:
        return SolveResult(np.full(prob.n, np.nan), math.inf, "Infeasible", 0,
                           info={"reason": "inconsistent equality constraints"})
    x0, N = par
    out = grid_minimize(lambda X: batch_objective(prob, X), lambda X: batch_violation(prob, X, equalities=False),
                        x0, N, box, grid_points_per_dim, passes, max_points, feas_tol)
    return _result(out, N.shape[1])


def oracle_solve_epigraph(ep, box: float = 4.0, grid_points_per_dim: int = 201,
                          passes: int = 30, max_points: int = 200_000) -> SolveResult:
    """Grid oracle for the epigraph (double dual) form over ``(x, y)``."""
    A, b = ep.eq_system()
    par = affine_parametrization(A, b, ep.n_vars)
    if par is None:
        return SolveResult(np.full(ep.n_vars, np.nan), math.inf, "Infeasible", 0)
    x0, N = par
    out = grid_minimize(ep.objective, lambda z: ep.violation(z, equalities=False), x0, N, box, grid_points_per_dim,
                        passes, max_points)
    return _result(out, N.shape[1])


def _result(out: GridOutcome, r: int) -> SolveResult:
    info = {"spacing": out.spacing, "lipschitz": out.lipschitz,
            "accuracy": out.spacing * out.lipschitz * math.sqrt(max(r, 1)),
            "passes": out.passes, "evaluations": out.evaluations, "free_dims": r}
    if out.x is None:
        return SolveResult(np.full(0, np.nan), math.inf, "Infeasible", out.passes, info=info)
    return SolveResult(out.x, out.value, "ToleranceReached", out.passes, info=info)


def slater_probe(prob: Problem, box: float = 4.0, grid_points_per_dim: int = 15,
                 passes: int = 6, margin: float = 1e-6):
    """Search ``{A x = b}`` for a point maximizing the smallest inequality slack.

    Returns ``(x, min_slack, verified)``; ``verified`` means the slack
    exceeds ``margin`` (with no inequalities any domain point qualifies).
    """
    par = affine_parametrization(prob.A, prob.b, prob.n)
    if par is None:
        return None, -math.inf, False
    x0, N = par

    def neg_slack(X):
        G = prob.gauge.eval(X)
        fin = np.all(np.isfinite(G), axis=-1)
        Gs = np.where(np.isfinite(G), G, 0.0)
        if prob.l == 0:
            return np.where(fin, -1.0, np.inf)
        s = np.min(prob.p - X @ prob.H.T - Gs @ prob.K.T, axis=-1)
        return np.where(fin, -s, np.inf)

    out = grid_minimize(neg_slack, lambda X: np.zeros(len(X)), x0, N, box,
                        grid_points_per_dim, passes)
    if out.x is None:
        return None, -math.inf, False
    if prob.l == 0:
        return out.x, math.inf, True
    s = -out.value
    return out.x, s, bool(s > margin)

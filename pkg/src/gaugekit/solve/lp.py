"""Dense LP front end backed by HiGHS (through scipy)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ..errors import Infeasible, Unbounded


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    status: str
    dual_objective: float
    eq_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ub_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    residual: float = 0.0


def _as_2d(M, ncols):
    if M is None:
        return np.zeros((0, ncols))
    M = np.asarray(M, dtype=float)
    return M.reshape(-1, ncols)


def solve_lp(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, bounds=(None, None),
             raise_on_failure=True) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_eq x = b_eq`` and ``A_ub x <= b_ub``.

    Variables are free unless ``bounds`` says otherwise (same convention as
    :func:`scipy.optimize.linprog`). The returned ``dual_objective`` is
    assembled from the HiGHS marginals so callers can check LP duality.

    Raises :class:`Infeasible` / :class:`Unbounded` when ``raise_on_failure``;
    otherwise the status string is ``"infeasible"`` / ``"unbounded"`` and the
    objective is ``+inf`` / ``-inf``.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    A_eq = _as_2d(A_eq, n)
    A_ub = _as_2d(A_ub, n)
    b_eq = np.asarray(b_eq if b_eq is not None else np.zeros(0), dtype=float).ravel()
    b_ub = np.asarray(b_ub if b_ub is not None else np.zeros(0), dtype=float).ravel()
    res = linprog(
        c,
        A_ub=A_ub if A_ub.shape[0] else None,
        b_ub=b_ub if A_ub.shape[0] else None,
        A_eq=A_eq if A_eq.shape[0] else None,
        b_eq=b_eq if A_eq.shape[0] else None,
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10,
                 "dual_feasibility_tolerance": 1e-10},
    )
    if res.status == 2:
        if raise_on_failure:
            raise Infeasible("linear program is infeasible")
        return LPResult(np.full(n, np.nan), np.inf, "infeasible", np.inf)
    if res.status == 3:
        if raise_on_failure:
            raise Unbounded("linear program is unbounded")
        return LPResult(np.full(n, np.nan), -np.inf, "unbounded", -np.inf)
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")

    x = np.asarray(res.x, dtype=float)
    eq_duals = np.asarray(res.eqlin.marginals, dtype=float) if A_eq.shape[0] else np.zeros(0)
    ub_duals = np.asarray(res.ineqlin.marginals, dtype=float) if A_ub.shape[0] else np.zeros(0)
    dual_obj = float(b_eq @ eq_duals + b_ub @ ub_duals)
    lo = getattr(res, "lower", None)
    up = getattr(res, "upper", None)
    if lo is not None and lo.marginals is not None:
        lb = _bound_vector(bounds, n, 0)
        mask = np.isfinite(lb)
        dual_obj += float(lb[mask] @ lo.marginals[mask])
    if up is not None and up.marginals is not None:
        ub = _bound_vector(bounds, n, 1)
        mask = np.isfinite(ub)
        dual_obj += float(ub[mask] @ up.marginals[mask])

    resid = 0.0
    if A_eq.shape[0]:
        resid = max(resid, float(np.max(np.abs(A_eq @ x - b_eq))))
    if A_ub.shape[0]:
        resid = max(resid, float(np.max(np.maximum(A_ub @ x - b_ub, 0.0))))
    return LPResult(x, float(res.fun), "optimal", dual_obj, eq_duals, ub_duals, resid)


def _bound_vector(bounds, n, which):
    if isinstance(bounds, tuple) and len(bounds) == 2 and not isinstance(bounds[0], (tuple, list)):
        val = bounds[which]
        default = -np.inf if which == 0 else np.inf
        return np.full(n, default if val is None else float(val))
    out = np.empty(n)
    for j, b in enumerate(bounds):
        val = b[which]
        out[j] = (-np.inf if which == 0 else np.inf) if val is None else float(val)
    return out

"""Optimality certificates, Lagrangian evaluation and unboundedness witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .dual import DualPoint, as_dual, dual_objective, dual_slack
from .errors import NegativeMultiplier, NotInfeasible, WitnessUnavailable
from .gauges import holder_product
from .model import FeasReport, Problem, as_point, primal_feasibility, primal_objective

CERT_TOL = 1e-6

CONDITIONS = ("primal_feasibility", "dual_feasibility", "comp_gauge", "comp_ineq", "alignment")


@dataclass
class OptimalityReport:
    primal_feas: FeasReport
    dual_feasible: bool
    dual_slack: np.ndarray
    comp_gauge: np.ndarray
    comp_ineq: np.ndarray
    alignment_residual: float
    duality_gap: float
    primal_objective: float
    dual_objective: float
    tol: float
    verdicts: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(self.verdicts.values())

    @property
    def dual_violation(self) -> float:
        return float(max(0.0, -np.min(self.dual_slack))) if self.dual_slack.size else 0.0

    def to_dict(self) -> dict:
        return {
            "primal_feas": self.primal_feas.to_dict(),
            "dual_feasible": self.dual_feasible,
            "dual_slack": self.dual_slack.tolist(),
            "comp_gauge": self.comp_gauge.tolist(),
            "comp_ineq": self.comp_ineq.tolist(),
            "alignment_residual": self.alignment_residual,
            "duality_gap": self.duality_gap,
            "primal_objective": self.primal_objective,
            "dual_objective": self.dual_objective,
            "tol": self.tol,
            "verdicts": dict(self.verdicts),
            "verdict": self.verdict,
        }


def check_optimality(prob: Problem, x, dp, tol: float = CERT_TOL) -> OptimalityReport:
    """Evaluate primal/dual feasibility, both complementarity conditions and
    the alignment condition at ``(x, (u, v))``.

    A polar value of ``+inf`` paired with a nonzero gauge value makes the
    corresponding residual ``inf`` (the condition fails; nothing is raised).
    """
    pt = as_point(prob, x)
    dp = as_dual(prob, dp)
    feas = primal_feasibility(prob, pt, tol)
    ds = dual_slack(prob, dp, tol)
    g = pt.gvals

    comp_gauge = np.array([holder_product(abs(s), gv) if gv != 0 else 0.0
                           for s, gv in zip(ds.slack, g)])
    if prob.l and pt.in_domain:
        comp_ineq = np.abs((prob.p - prob.H @ pt.x - prob.K @ g) * dp.v)
    else:
        comp_ineq = np.full(prob.l, math.inf if not pt.in_domain else 0.0)

    if pt.in_domain:
        paired = sum(holder_product(pv, gv) if gv != 0 else 0.0
                     for pv, gv in zip(ds.polar_vals, g))
        alignment = abs(paired - float(ds.alpha @ pt.x)) if math.isfinite(paired) else math.inf
    else:
        alignment = math.inf

    pobj = primal_objective(prob, pt)
    dobj = dual_objective(prob, dp)
    gap = pobj - dobj
    verdicts = {
        "primal_feasibility": feas.feasible,
        "dual_feasibility": ds.feasible,
        "comp_gauge": bool(np.all(comp_gauge <= tol)),
        "comp_ineq": bool(np.all(comp_ineq <= tol)),
        "alignment": bool(alignment <= tol),
    }
    return OptimalityReport(feas, ds.feasible, ds.slack, comp_gauge, comp_ineq,
                            float(alignment), float(gap), float(pobj), float(dobj), tol, verdicts)


def gap_decomposition(prob: Problem, x, dp) -> dict:
    """Split the duality gap into its three nonnegative parts.

    For ``A x + B G(x) = b`` the identity

        gap = slack@G(x) + v@(p - Hx - K G(x)) + (G°(alpha)@G(x) - alpha@x)

    holds exactly; ``identity_error`` reports how far it is from holding.
    """
    pt = as_point(prob, x)
    dp = as_dual(prob, dp)
    ds = dual_slack(prob, dp)
    g = pt.gvals
    comp_gauge = float(ds.slack @ g)
    comp_ineq = float(dp.v @ (prob.p - prob.H @ pt.x - prob.K @ g)) if prob.l else 0.0
    deficit = float(ds.polar_vals @ g - ds.alpha @ pt.x)
    gap = primal_objective(prob, pt) - dual_objective(prob, dp)
    return {"gap": gap, "comp_gauge": comp_gauge, "comp_ineq": comp_ineq,
            "alignment_deficit": deficit,
            "identity_error": abs(gap - (comp_gauge + comp_ineq + deficit))}


def lagrangian_value(prob: Problem, x, dp) -> float:
    """``c@x + d@G + u@(b - Ax - BG) - v@(p - Hx - KG)``.

    The inequality multiplier enters with a minus sign so that the infimum
    over ``x`` equals ``b@u - p@v`` on the dual feasible set.
    """
    pt = as_point(prob, x)
    dp = as_dual(prob, dp)
    if not pt.in_domain:
        return math.inf
    g = pt.gvals
    val = prob.c @ pt.x + prob.d @ g + dp.u @ (prob.b - prob.A @ pt.x - prob.B @ g)
    if prob.l:
        val -= dp.v @ (prob.p - prob.H @ pt.x - prob.K @ g)
    return float(val)


def batch_lagrangian(prob: Problem, X, dp) -> np.ndarray:
    dp = as_dual(prob, dp)
    X = np.atleast_2d(X)
    G = prob.gauge.eval(X)
    finite = np.all(np.isfinite(G), axis=-1)
    Gs = np.where(np.isfinite(G), G, 0.0)
    val = X @ prob.c + Gs @ prob.d + (prob.b - X @ prob.A.T - Gs @ prob.B.T) @ dp.u
    if prob.l:
        val -= (prob.p - X @ prob.H.T - Gs @ prob.K.T) @ dp.v
    return np.where(finite, val, np.inf)


def lagrangian_dual_value(prob: Problem, dp, tol: float = 1e-9) -> float:
    """Closed form of ``inf_x L(x, u, v)``: the dual objective on the dual
    feasible set and ``-inf`` off it."""
    dp = as_dual(prob, dp)
    if np.any(dp.v < 0):
        raise NegativeMultiplier(f"inequality multipliers must be nonnegative: v = {dp.v}")
    ds = dual_slack(prob, dp, tol)
    if not ds.feasible:
        return -math.inf
    return dual_objective(prob, dp)


@dataclass
class UnboundednessWitness:
    """A ray ``x(t) = base_point + t * direction`` along which the Lagrangian
    decreases with rate ``slope`` (``L(x(t)) = offset - slope * t``)."""

    block_index: int
    base_point: np.ndarray
    direction: np.ndarray
    case_tag: str
    slope: float
    offset: float

    def point(self, t: float) -> np.ndarray:
        return self.base_point + t * self.direction

    def sequence(self, start: float = 1.0, factor: float = 10.0) -> Iterator[np.ndarray]:
        """Points along the ray with geometrically growing ``t``."""
        t = start
        while True:
            yield self.point(t)
            t *= factor


def unboundedness_witness(prob: Problem, dp, tol: float = 1e-9) -> UnboundednessWitness:
    """Ray on which ``L(., u, v)`` is unbounded below at a dual infeasible point.

    Picks the most violated block ``j`` and, depending on its polar value
    ``phi_j``, builds

    * ``finite_polar``  (0 < phi_j < inf): ``t * x_bar`` with ``x_bar`` a
      maximizer on the unit sphere, slope ``phi_j - beta_j``;
    * ``infinite_polar``: a recession direction ``r`` with ``g_j(r) = 0`` and
      ``alpha_j @ r > 0``, slope ``alpha_j @ r``;
    * ``zero_polar`` (``alpha_j = 0``, ``beta_j < 0``): any ``x_hat`` with
      ``g_j(x_hat) > 0``, slope ``-beta_j * g_j(x_hat)``.
    """
    dp = as_dual(prob, dp)
    if np.any(dp.v < 0):
        raise NegativeMultiplier(f"inequality multipliers must be nonnegative: v = {dp.v}")
    ds = dual_slack(prob, dp, tol)
    if ds.feasible:
        raise NotInfeasible("dual point is feasible; the Lagrangian is bounded below")
    j = int(np.argmin(ds.slack))
    spec = prob.specs[j]
    block = prob.partition.blocks[j]
    a_j = ds.alpha[block]
    beta_j = float(ds.beta[j])
    phi_j = float(ds.polar_vals[j])
    offset = dual_objective(prob, dp)

    def lift(xb):
        x = np.zeros(prob.n)
        x[block] = xb
        return x

    if math.isinf(phi_j):
        r = spec.recession_ray(a_j)
        if r is None:
            raise WitnessUnavailable(f"block {j}: no recession direction found")
        slope = float(a_j @ r) - beta_j * float(spec.eval(r))
        return UnboundednessWitness(j, np.zeros(prob.n), lift(r), "infinite_polar", slope, offset)

    if phi_j > tol:
        if spec.vanishes_only_at_zero:
            xb = spec.support_argmax(a_j).x_bar
        else:
            xb = _maximizer(spec, a_j)
        gv = float(spec.eval(xb))
        if gv > 0:
            xb = xb / gv
        slope = float(a_j @ xb) - beta_j * float(spec.eval(xb))
        return UnboundednessWitness(j, np.zeros(prob.n), lift(xb), "finite_polar", slope, offset)

    # polar vanishes and beta_j < 0
    if not (getattr(spec, "full_domain", False) and getattr(spec, "not_identically_zero", False)):
        raise WitnessUnavailable(
            f"block {j}: zero polar with negative beta needs a full-domain gauge that is not identically 0")
    xh = spec.nonzero_direction()
    slope = float(a_j @ xh) - beta_j * float(spec.eval(xh))
    return UnboundednessWitness(j, np.zeros(prob.n), lift(xh), "zero_polar", slope, offset)


def _maximizer(spec, alpha):
    """Maximizer of ``alpha @ x`` on the unit ball for gauges without a
    bounded ball (finite polar guarantees one exists)."""
    from .gauges import PolyhedralGauge, Scaled
    from .solve.lp import solve_lp
    if isinstance(spec, Scaled):
        return _maximizer(spec.inner, alpha) / spec.alpha
    if isinstance(spec, PolyhedralGauge):
        return solve_lp(-alpha, A_ub=spec.G, b_ub=np.ones(spec.G.shape[0])).x
    raise WitnessUnavailable(f"no maximizer oracle for {type(spec).__name__}")


def witness_drives_below(prob: Problem, dp, witness: UnboundednessWitness,
                         level: float = -1e6, t_max: float = 1e8) -> tuple[bool, float, float]:
    """Walk ``t = 1, 10, 100, ...`` up to ``t_max``; report whether the
    Lagrangian went below ``level`` and where."""
    t = 1.0
    val = math.inf
    while t <= t_max:
        val = lagrangian_value(prob, witness.point(t), dp)
        if val < level:
            return True, t, val
        t *= 10.0
    return False, t_max, val


__all__ = [
    "CONDITIONS", "OptimalityReport", "check_optimality", "gap_decomposition",
    "lagrangian_value", "batch_lagrangian", "lagrangian_dual_value",
    "UnboundednessWitness", "unboundedness_witness", "witness_drives_below", "DualPoint",
]

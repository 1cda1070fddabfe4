"""Primal recovery from a KKT point of the dual.

Write ``phi_i(u, v) = g_i°(alpha_i)`` with ``alpha = A^T u - H^T v - c``.
A dual KKT point carries multipliers ``lam >= 0`` for the polar constraints
and ``mu >= 0`` for ``v >= 0``, and satisfies::

    b = U^T lam + B lam              (stationarity in u)
    p + V^T lam - K lam - mu = 0     (stationarity in v)
    lam @ slack = 0,  v @ mu = 0     (complementarity)

where row ``U_i = (A_i xbar_i)^T`` and ``V_i = -(H_i xbar_i)^T`` come from a
maximizer ``xbar_i`` of ``alpha_i @ x`` over ``{g_i <= 1}``.  Setting
``x*_i = lam_i xbar_i`` gives a primal optimum provided ``g_i(xbar_i) = 1``
wherever ``lam_i > 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certify import CERT_TOL, OptimalityReport, check_optimality
from .dual import DualPoint, alpha_beta, as_dual
from .errors import (Assumption5Violated, AssumptionViolated, DimensionMismatch,
                     KKTResidualTooLarge, SphereConditionViolated)
from .model import PrimalPoint, Problem


@dataclass
class DualKKTPoint:
    u: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    x_bar_blocks: list | None = None

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float).ravel()
        self.v = np.asarray(self.v, dtype=float).ravel()
        self.lam = np.asarray(self.lam, dtype=float).ravel()
        self.mu = np.asarray(self.mu, dtype=float).ravel()
        if self.x_bar_blocks is not None:
            self.x_bar_blocks = [np.asarray(xb, dtype=float).ravel() for xb in self.x_bar_blocks]

    @property
    def dual(self) -> DualPoint:
        return DualPoint(self.u, self.v)

    def check(self, prob: Problem, tol: float = 0.0) -> "DualKKTPoint":
        if (self.u.size, self.v.size, self.lam.size, self.mu.size) != (prob.k, prob.l, prob.m, prob.l):
            raise DimensionMismatch("KKT point sizes do not match the problem")
        if np.any(self.lam < -tol) or np.any(self.mu < -tol):
            raise ValueError("lambda and mu must be nonnegative")
        if self.x_bar_blocks is not None:
            if len(self.x_bar_blocks) != prob.m:
                raise DimensionMismatch("one x_bar per block required")
            for i, (xb, blk) in enumerate(zip(self.x_bar_blocks, prob.partition.blocks)):
                if xb.size != blk.size:
                    raise DimensionMismatch(f"x_bar block {i} has length {xb.size}, expected {blk.size}")
        return self


@dataclass
class KKTResidual:
    stationarity_u: float
    stationarity_v: float
    comp_constraint: float
    comp_sign: float
    feas: float

    @property
    def max(self) -> float:
        return max(self.stationarity_u, self.stationarity_v, self.comp_constraint,
                   self.comp_sign, self.feas)

    def to_dict(self) -> dict:
        return {"stationarity_u": self.stationarity_u, "stationarity_v": self.stationarity_v,
                "comp_constraint": self.comp_constraint, "comp_sign": self.comp_sign,
                "feas": self.feas}


def _require_assumption5(prob: Problem):
    bad = [i for i, s in enumerate(prob.specs) if not s.satisfies_assumption5]
    if bad:
        raise Assumption5Violated(f"blocks {bad} may vanish away from 0")


def phi_value(prob: Problem, dp, check: bool = False, tol: float = 1e-9) -> np.ndarray:
    """Blockwise polar values ``g_i°(alpha_i)``.

    With ``check=True`` each finite value is compared against
    ``alpha_i @ xbar_i`` for the support maximizer (needs bounded balls).
    """
    dp = as_dual(prob, dp)
    alpha, _ = alpha_beta(prob, dp.u, dp.v)
    vals = prob.gauge.polar(alpha)
    if check:
        for i, (spec, blk) in enumerate(zip(prob.specs, prob.partition.blocks)):
            if not math.isfinite(vals[i]) or not spec.satisfies_assumption5:
                continue
            xb = spec.support_argmax(alpha[blk]).x_bar
            realized = float(alpha[blk] @ xb)
            if abs(realized - vals[i]) > tol * max(1.0, abs(vals[i])):
                raise AssertionError(f"block {i}: polar {vals[i]} but support value {realized}")
    return vals


def phi_subgradients(prob: Problem, dp) -> dict:
    """One subgradient row of each ``phi_i`` from a support maximizer.

    Returns ``{"U": (m, k), "V": (m, l), "x_bar_blocks": [...]}``.
    """
    _require_assumption5(prob)
    dp = as_dual(prob, dp)
    alpha, _ = alpha_beta(prob, dp.u, dp.v)
    xbars = [spec.support_argmax(alpha[blk]).x_bar
             for spec, blk in zip(prob.specs, prob.partition.blocks)]
    U, V = _uv_rows(prob, xbars)
    return {"U": U, "V": V, "x_bar_blocks": xbars}


def _uv_rows(prob: Problem, xbars):
    U = np.zeros((prob.m, prob.k))
    V = np.zeros((prob.m, prob.l))
    for i, (xb, blk) in enumerate(zip(xbars, prob.partition.blocks)):
        U[i] = prob.A[:, blk] @ xb
        V[i] = -(prob.H[:, blk] @ xb)
    return U, V


def _select_xbars(prob: Problem, kkt: DualKKTPoint, tol: float):
    """User-supplied maximizers after validation, else support maximizers."""
    if kkt.x_bar_blocks is None:
        return phi_subgradients(prob, kkt.dual)["x_bar_blocks"]
    _require_assumption5(prob)
    alpha, _ = alpha_beta(prob, kkt.u, kkt.v)
    polar = prob.gauge.polar(alpha)
    for i, (spec, blk, xb) in enumerate(zip(prob.specs, prob.partition.blocks, kkt.x_bar_blocks)):
        gv = float(spec.eval(xb))
        if gv > 1.0 + tol:
            raise KKTResidualTooLarge(f"x_bar block {i} leaves the unit ball (g = {gv:.3g})")
        if float(alpha[blk] @ xb) < polar[i] - tol * max(1.0, abs(polar[i])):
            raise KKTResidualTooLarge(
                f"x_bar block {i} is not a support maximizer: "
                f"alpha@x_bar = {float(alpha[blk] @ xb):.12g} < polar {polar[i]:.12g}")
    return kkt.x_bar_blocks


def kkt_residual(prob: Problem, kkt: DualKKTPoint, tol: float = CERT_TOL) -> KKTResidual:
    """Residuals of the dual KKT system.

    ``B lam`` joins the u-stationarity term for problems with a gauge term in
    the equalities (it vanishes for gauge problems).
    """
    kkt.check(prob, tol=math.inf)
    xbars = _select_xbars(prob, kkt, tol)
    U, V = _uv_rows(prob, xbars)
    lam, mu = kkt.lam, kkt.mu
    st_u = float(np.max(np.abs(U.T @ lam + prob.B @ lam - prob.b))) if prob.k else 0.0
    st_v = float(np.max(np.abs(prob.p + V.T @ lam - prob.K @ lam - mu))) if prob.l else 0.0
    alpha, beta = alpha_beta(prob, kkt.u, kkt.v)
    slack = beta - prob.gauge.polar(alpha)
    active = lam != 0
    comp_c = float(abs(np.sum(lam[active] * slack[active]))) if np.any(active) else 0.0
    comp_s = float(abs(kkt.v @ mu)) if prob.l else 0.0
    neg = [0.0, -float(np.min(slack)) if slack.size else 0.0]
    for arr in (lam, mu, kkt.v):
        if arr.size:
            neg.append(-float(np.min(arr)))
    return KKTResidual(st_u, st_v, comp_c, comp_s, max(neg))


@dataclass
class Recovery:
    x_star: PrimalPoint
    report: OptimalityReport
    residual: KKTResidual


def recover_primal(prob: Problem, kkt: DualKKTPoint, tol: float = CERT_TOL) -> Recovery:
    """Assemble ``x*_i = lam_i xbar_i`` and certify it.

    Raises
    ------
    KKTResidualTooLarge
        the KKT system is not satisfied within ``tol``, or the certificate
        fails at the assembled point.
    SphereConditionViolated
        ``g_i(xbar_i) != 1`` for a block with ``lam_i != 0``.  The message
        says whether the sufficient condition (full domain and
        ``alpha_i != 0``) held.
    Assumption5Violated
        some block gauge vanishes away from the origin.
    """
    if not prob.is_convex:
        raise AssumptionViolated("recovery needs nonnegative d and K")
    _require_assumption5(prob)
    kkt.check(prob, tol=tol)
    xbars = _select_xbars(prob, kkt, tol)
    res = kkt_residual(prob, DualKKTPoint(kkt.u, kkt.v, kkt.lam, kkt.mu, xbars), tol)
    if res.max > tol:
        raise KKTResidualTooLarge(f"KKT residuals exceed {tol:g}: {res.to_dict()}")

    alpha, _ = alpha_beta(prob, kkt.u, kkt.v)
    for i, (spec, blk, xb) in enumerate(zip(prob.specs, prob.partition.blocks, xbars)):
        if kkt.lam[i] == 0:
            continue
        gv = float(spec.eval(xb))
        if abs(gv - 1.0) > tol:
            a_nonzero = bool(np.any(alpha[blk]))
            full = bool(getattr(spec, "full_domain", True))
            if full and a_nonzero:
                why = "the sufficient condition (full domain, alpha_i != 0) holds, so x_bar is not a support maximizer"
            else:
                why = ("alpha_i = 0" if not a_nonzero else "g_i does not have full domain")
            raise SphereConditionViolated(
                f"block {i}: lambda = {kkt.lam[i]:.6g} but g(x_bar) = {gv:.12g}; {why}")

    x = prob.partition.assemble([lam_i * xb for lam_i, xb in zip(kkt.lam, xbars)])
    pt = PrimalPoint.at(prob, x)
    report = check_optimality(prob, pt, kkt.dual, tol)
    if not report.verdict:
        failed = [k for k, ok in report.verdicts.items() if not ok]
        raise KKTResidualTooLarge(f"recovered point fails {failed} at tol {tol:g}")
    return Recovery(pt, report, res)


__all__ = ["DualKKTPoint", "KKTResidual", "Recovery", "phi_value", "phi_subgradients",
           "kkt_residual", "recover_primal"]

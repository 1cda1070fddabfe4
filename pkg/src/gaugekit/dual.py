"""Closed-form dual and double dual.

For the primal in :mod:`gaugekit.model` the dual is::

    max  b@u - p@v
    s.t. G°(A^T u - H^T v - c) + B^T u - K^T v <= d,   v >= 0

where ``G°`` applies the polar of each block gauge.  With
``alpha = A^T u - H^T v - c`` and ``beta = d - B^T u + K^T v`` dual
feasibility is ``slack = beta - G°(alpha) >= 0`` together with ``v >= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .model import FEAS_TOL, Problem, VectorGauge


@dataclass
class DualPoint:
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float).ravel()
        self.v = np.asarray(self.v, dtype=float).ravel()

    @classmethod
    def zeros(cls, prob: Problem) -> "DualPoint":
        return cls(np.zeros(prob.k), np.zeros(prob.l))

    def check(self, prob: Problem) -> "DualPoint":
        if self.u.size != prob.k or self.v.size != prob.l:
            raise DimensionMismatch(
                f"dual point sizes ({self.u.size}, {self.v.size}) != ({prob.k}, {prob.l})")
        return self


def as_dual(prob: Problem, dp) -> DualPoint:
    if isinstance(dp, DualPoint):
        return dp.check(prob)
    u, v = dp
    return DualPoint(u, v).check(prob)


@dataclass
class DualSlack:
    alpha: np.ndarray
    beta: np.ndarray
    polar_vals: np.ndarray
    slack: np.ndarray
    feasible: bool

    @property
    def min_slack(self) -> float:
        return float(np.min(self.slack)) if self.slack.size else math.inf


def dual_objective(prob: Problem, dp) -> float:
    dp = as_dual(prob, dp)
    return float(prob.b @ dp.u - prob.p @ dp.v)


def alpha_beta(prob: Problem, u, v):
    alpha = prob.A.T @ u - prob.H.T @ v - prob.c
    beta = prob.d - prob.B.T @ u + prob.K.T @ v
    return alpha, beta


def dual_slack(prob: Problem, dp, tol: float = FEAS_TOL) -> DualSlack:
    dp = as_dual(prob, dp)
    alpha, beta = alpha_beta(prob, dp.u, dp.v)
    polar_vals = prob.gauge.polar(alpha)
    slack = beta - polar_vals
    feasible = bool(np.all(slack >= -tol) and np.all(dp.v >= -tol))
    return DualSlack(alpha, beta, polar_vals, slack, feasible)


@dataclass(frozen=True, eq=False)
class DualProblem:
    """The dual of ``primal``, carried by the primal data and the polar gauges."""

    primal: Problem
    polar: VectorGauge

    @property
    def n_vars(self):
        return self.primal.k + self.primal.l

    def objective(self, dp) -> float:
        return dual_objective(self.primal, dp)

    def slack(self, dp, tol=FEAS_TOL) -> DualSlack:
        dp = as_dual(self.primal, dp)
        alpha, beta = alpha_beta(self.primal, dp.u, dp.v)
        polar_vals = self.polar.eval(alpha)
        slack = beta - polar_vals
        feasible = bool(np.all(slack >= -tol) and np.all(dp.v >= -tol))
        return DualSlack(alpha, beta, polar_vals, slack, feasible)


def dualize(prob: Problem) -> DualProblem:
    return DualProblem(prob, prob.gauge.polar_gauge())


@dataclass(frozen=True, eq=False)
class EpigraphProblem:
    """Lifted problem over ``(x, y)``::

        min  c@x + d@y
        s.t. A x + B y = b,  H x + K y <= p,  G(x) <= y
    """

    base: Problem

    @property
    def n_vars(self):
        return self.base.n + self.base.m

    def split(self, z):
        z = np.asarray(z, dtype=float)
        return z[..., : self.base.n], z[..., self.base.n:]

    def objective(self, z) -> np.ndarray:
        x, y = self.split(z)
        return x @ self.base.c + y @ self.base.d

    def violation(self, z, equalities: bool = True) -> np.ndarray:
        """Largest constraint violation per row of ``z`` (0 when feasible)."""
        pb = self.base
        z = np.atleast_2d(z)
        x, y = self.split(z)
        G = pb.gauge.eval(x)
        viol = np.max(np.where(np.isfinite(G), G - y, np.inf), axis=-1)
        viol = np.maximum(viol, 0.0)
        if pb.l:
            viol = np.maximum(viol, np.max(x @ pb.H.T + y @ pb.K.T - pb.p, axis=-1))
        if pb.k and equalities:
            viol = np.maximum(viol, np.max(np.abs(x @ pb.A.T + y @ pb.B.T - pb.b), axis=-1))
        return viol

    def eq_system(self):
        pb = self.base
        return np.hstack([pb.A, pb.B]), pb.b


def build_double_dual(prob) -> EpigraphProblem:
    """Dual of the dual, in epigraph form.

    Accepts a :class:`Problem` or a :class:`DualProblem`.  The polar of the
    polar gives back the catalogue gauge (all catalogue gauges are closed),
    so the epigraph couplings use the original blocks.
    """
    if isinstance(prob, DualProblem):
        prob = prob.primal.replace(gauge=prob.polar.polar_gauge())
    return EpigraphProblem(prob)

"""KKT multipliers from an (approximately) optimal dual point.

Two stages:

1. **Face LP.**  For every block whose dual slack is small, list the
   vertices of the support face (maximizers of ``alpha_i @ x`` over the unit
   ball) and find weights ``theta >= 0`` with
   ``x_i = sum_j theta_ij xvert_ij`` and ``lam_i = sum_j theta_ij`` that
   satisfy the primal constraints, while penalizing complementarity
   (``slack_i lam_i`` and ``v_j mu_j``) and constraint residuals.
2. **Polish.**  With the active blocks, used vertices and tight rows fixed,
   solve the square KKT system in ``(u, v, lam/theta, mu)`` by bounded
   least squares.  Curved blocks (``1 < p < inf``) move their maximizer with
   ``alpha``; polyhedral blocks keep their vertex set and impose
   ``alpha_i @ (xvert_ij - xvert_i0) = 0``.

The polished point is kept only if it stays dual feasible and its faces
remain maximizers; otherwise the face-LP point is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from ..dual import DualPoint, alpha_beta, as_dual
from ..errors import Assumption5Violated
from ..gauges import PNorm, Scaled, WeightedPNorm
from ..model import Problem
from ..recover import DualKKTPoint, KKTResidual, kkt_residual
from .lp import solve_lp


@dataclass
class KKTExtraction:
    kkt: DualKKTPoint
    residual: KKTResidual
    polished: bool
    info: dict = field(default_factory=dict)


def _curved(spec) -> bool:
    """Unit-ball boundary is smooth and strictly convex (unique maximizer
    moving continuously with ``alpha``)."""
    if isinstance(spec, Scaled):
        return _curved(spec.inner)
    if isinstance(spec, (PNorm, WeightedPNorm)):
        return 1.0 < spec.p < math.inf
    return False


def _vertices(spec, a, tol):
    if _curved(spec):
        if not np.any(a):
            return None
        return spec.support_argmax(a).x_bar[None, :]
    face = spec.support_face(a, tol)
    if face is None and np.any(a):
        face = spec.support_argmax(a).x_bar[None, :]
    return face


def extract_kkt(prob: Problem, dp, slack_cut: float = 1e-3, face_tol: float = 1e-5,
                polish: bool = True, weight: float = 1e3) -> KKTExtraction:
    """Multipliers ``(lam, mu)`` and support maximizers for a dual point.

    ``slack_cut`` bounds the dual slack of blocks that may carry weight;
    ``face_tol`` is the (relative) tolerance for support-face vertices.
    """
    bad = [i for i, s in enumerate(prob.specs) if not s.satisfies_assumption5]
    if bad:
        raise Assumption5Violated(f"blocks {bad} may vanish away from 0")
    dp = as_dual(prob, dp)
    blocks = prob.partition.blocks
    alpha, beta = alpha_beta(prob, dp.u, dp.v)
    slack = beta - prob.gauge.polar(alpha)
    scale = 1.0 + np.abs(beta)

    verts = {}
    for i, (spec, blk) in enumerate(zip(prob.specs, blocks)):
        if slack[i] > slack_cut * scale[i]:
            continue
        a = alpha[blk]
        V = _vertices(spec, a, face_tol * max(1.0, float(np.max(np.abs(a)))))
        if V is not None:
            verts[i] = V

    lp = _face_lp(prob, dp, slack, verts, weight)
    theta, mu = lp["theta"], lp["mu"]
    kkt = _assemble(prob, dp, verts, theta, mu)
    best = (kkt, kkt_residual(prob, kkt))
    info = {"lp_residual": lp["residual"], "active_blocks": sorted(i for i in theta if theta[i].sum() > 0)}
    polished = False
    if polish:
        out = _polish(prob, dp, verts, theta, mu)
        if out is not None:
            cand = out
            try:
                res = kkt_residual(prob, cand)
            except Exception:  # noqa: BLE001 - a failed polish just keeps the LP point
                res = None
            if res is not None and res.max < best[1].max:
                best = (cand, res)
                polished = True
    info["polished"] = polished
    return KKTExtraction(best[0], best[1], polished, info)


def _face_lp(prob, dp, slack, verts, weight):
    k, ell = prob.k, prob.l
    cols = []  # (block, vertex index)
    colA, colH, cost = [], [], []
    for i, V in verts.items():
        blk = prob.partition.blocks[i]
        for j, xv in enumerate(V):
            cols.append((i, j))
            colA.append(prob.A[:, blk] @ xv + prob.B[:, i])
            colH.append(prob.H[:, blk] @ xv + prob.K[:, i])
            cost.append(max(float(slack[i]), 0.0))
    nt = len(cols)
    # variables: theta (nt), mu (ell), r+ r- for k + ell rows
    nr = k + ell
    nvar = nt + ell + 2 * nr
    c = np.concatenate([cost, np.maximum(dp.v, 0.0), weight * np.ones(2 * nr)])
    Aeq = np.zeros((nr, nvar))
    if nt:
        if k:
            Aeq[:k, :nt] = np.array(colA).T
        if ell:
            Aeq[k:, :nt] = np.array(colH).T
    if ell:
        Aeq[k:, nt:nt + ell] = np.eye(ell)
    Aeq[:, nt + ell:nt + ell + nr] = np.eye(nr)
    Aeq[:, nt + ell + nr:] = -np.eye(nr)
    beq = np.concatenate([prob.b, prob.p])
    theta = {i: np.zeros(len(V)) for i, V in verts.items()}
    if nr == 0:
        return {"theta": theta, "mu": np.zeros(0), "residual": 0.0}
    res = solve_lp(c, A_eq=Aeq, b_eq=beq, bounds=(0.0, None))
    z = res.x
    for t, (i, j) in enumerate(cols):
        theta[i][j] = z[t]
    mu = z[nt:nt + ell]
    return {"theta": theta, "mu": mu, "residual": float(np.sum(z[nt + ell:]))}


def _assemble(prob, dp, verts, theta, mu, u=None, v=None, curved_lam=None):
    u = dp.u if u is None else u
    v = dp.v if v is None else v
    lam = np.zeros(prob.m)
    xbars = []
    alpha, _ = alpha_beta(prob, u, v)
    for i, (spec, blk) in enumerate(zip(prob.specs, prob.partition.blocks)):
        if i in verts and theta[i].sum() > 0:
            if curved_lam is not None and i in curved_lam:
                lam[i] = curved_lam[i]
                xbars.append(spec.support_argmax(alpha[blk]).x_bar)
            else:
                lam[i] = float(theta[i].sum())
                xbars.append(theta[i] @ verts[i] / lam[i])
        else:
            xbars.append(spec.support_argmax(alpha[blk]).x_bar)
    return DualKKTPoint(u, v, lam, np.maximum(mu, 0.0), xbars)


def _polish(prob, dp, verts, theta, mu, used_tol=1e-12):
    k, ell, m = prob.k, prob.l, prob.m
    blocks = prob.partition.blocks
    active = [i for i in verts if theta[i].sum() > used_tol]
    used = {i: np.flatnonzero(theta[i] > used_tol * max(1.0, theta[i].sum())) for i in active}
    tight = np.array([dp.v[j] >= mu[j] for j in range(ell)], dtype=bool)

    # unknown layout
    sizes = [k, int(tight.sum()), int((~tight).sum())]
    lay = []
    for i in active:
        lay.append((i, 1 if _curved(prob.specs[i]) else used[i].size))
    nvar = sum(sizes) + sum(s for _, s in lay)

    def unpack(z):
        u = z[:k]
        v = np.zeros(ell)
        v[tight] = z[k:k + sizes[1]]
        muv = np.zeros(ell)
        muv[~tight] = z[k + sizes[1]:k + sizes[1] + sizes[2]]
        pos = sum(sizes)
        w = {}
        for i, s in lay:
            w[i] = z[pos:pos + s]
            pos += s
        return u, v, muv, w

    def block_x(i, alpha, w):
        spec = prob.specs[i]
        if _curved(spec):
            xb = spec.support_argmax_batch(alpha[blocks[i]][None, :])[0]
            return w[i][0] * xb, w[i][0]
        V = verts[i][used[i]]
        return w[i] @ V, float(w[i].sum())

    def resid(z):
        u, v, muv, w = unpack(z)
        alpha, beta = alpha_beta(prob, u, v)
        x = np.zeros(prob.n)
        lam = np.zeros(m)
        eqs = []
        for i, _ in lay:
            xi, li = block_x(i, alpha, w)
            x[blocks[i]] = xi
            lam[i] = li
            spec = prob.specs[i]
            a = alpha[blocks[i]]
            if _curved(spec):
                eqs.append(float(spec.polar(a)) - beta[i])
            else:
                V = verts[i][used[i]]
                eqs.append(float(a @ V[0]) - beta[i])
                eqs.extend(V[1:] @ a - V[0] @ a)
        r1 = prob.A @ x + prob.B @ lam - prob.b
        r2 = prob.H @ x + prob.K @ lam + muv - prob.p
        return np.concatenate([r1, r2, np.array(eqs)])

    z0 = [dp.u, np.maximum(dp.v[tight], 0.0), np.maximum(mu[~tight], 0.0)]
    for i, s in lay:
        if _curved(prob.specs[i]):
            z0.append([theta[i].sum()])
        else:
            z0.append(theta[i][used[i]])
    z0 = np.concatenate([np.asarray(a, dtype=float).ravel() for a in z0])
    lo = np.full(nvar, -np.inf)
    lo[k:] = 0.0
    if nvar == 0:
        return None
    z0 = np.maximum(z0, lo)
    try:
        sol = least_squares(resid, z0, bounds=(lo, np.inf), method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200 * (nvar + 1))
    except (ValueError, np.linalg.LinAlgError):
        return None
    u, v, muv, w = unpack(sol.x)
    alpha, _ = alpha_beta(prob, u, v)
    th = {i: np.zeros(len(V)) for i, V in verts.items()}
    curved_lam = {}
    for i, _ in lay:
        if _curved(prob.specs[i]):
            curved_lam[i] = float(w[i][0])
            th[i][0] = max(float(w[i][0]), 1e-300)
        else:
            th[i][used[i]] = w[i]
    return _assemble(prob, DualPoint(u, v), verts, th, muv, u, v, curved_lam)


__all__ = ["KKTExtraction", "extract_kkt"]

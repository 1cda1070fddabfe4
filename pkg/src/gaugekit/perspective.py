"""Perspective reformulation of problems with general convex blocks.

A convex ``f`` anchored at ``z`` with subgradient ``eta`` splits as

    f(x) = h(x) + eta@x + (f(z) - eta@z),   h(x) = f(x) - f(z) - eta@(x - z) >= 0.

The closed perspective of a nonnegative convex ``h``::

    h_pi(x, zeta) = zeta * h(x / zeta)   zeta > 0
                  = h_rec(x)             zeta = 0   (recession function)
                  = +inf                 zeta < 0

is a gauge on ``(x, zeta)`` with ``h_pi(x, 1) = h(x)``.  Pinning every
``zeta_i = 1`` by equality rows turns a problem with nonnegative convex
blocks into a gauge problem whose dual is built by :mod:`gaugekit.dual`.

Lifted variable order is ``z = (x_I1, zeta_1, ..., x_Im, zeta_m)``.  The
equality rows interleave ``A`` rows with the pinning rows: row ``2i`` is
the ``i``-th row of ``A`` and row ``2i + 1`` pins ``zeta_i``; when the
number of equality rows ``k`` differs from ``m`` the leftover rows (of
whichever kind) follow in order.  ``PerspectiveProblem.row_kinds`` records
the order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .dual import DualPoint, DualProblem, dualize
from .errors import AnchorOutOfDomain, DimensionMismatch, NegativeFunctionValueDetected, SchemaError
from .gauges import GaugeSpec, Polar, gauge_from_dict
from .model import BlockPartition, Problem, VectorGauge

PSD_FLOOR = -1e-10
REC_TOL = 1e-10


def _rows(x, dim):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != dim:
        raise DimensionMismatch(f"expected last dimension {dim}, got shape {x.shape}")
    return x


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


# ------------------------------------------------------------ convex specs

class ConvexSpec:
    """A closed proper convex function on ``R^dim`` with an analytic
    recession function and subgradient."""

    dim: int

    def eval(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.eval(x)

    def subgradient(self, z) -> np.ndarray:
        raise NotImplementedError

    def recession(self, x):
        raise NotImplementedError

    def min_value(self) -> float:
        """Infimum over ``R^dim`` (``-inf`` if unbounded below)."""
        raise NotImplementedError

    def minus_affine(self, eta, const) -> "ConvexSpec":
        """``x -> f(x) - eta@x - const`` as a spec of the same family."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class ConvexQuadratic(ConvexSpec):
    """``x@Q@x + q@x + r`` with ``Q`` symmetric positive semidefinite."""

    Q: np.ndarray
    q: np.ndarray
    r: float = 0.0

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        q = np.asarray(self.q, dtype=float).ravel()
        if Q.shape != (q.size, q.size):
            raise DimensionMismatch(f"Q has shape {Q.shape}, q has length {q.size}")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        w = np.linalg.eigvalsh(Q)
        if w.min() < PSD_FLOOR:
            raise ValueError(f"Q is not positive semidefinite (eigenvalue {w.min():.3g})")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", float(self.r))
        big = w > 1e-12 * max(float(w.max()), 1e-300)
        V = np.linalg.eigh(Q)[1]
        object.__setattr__(self, "_Qpinv", (V[:, big] / w[big]) @ V[:, big].T)
        # projector onto null(Q)
        object.__setattr__(self, "_null", V[:, ~big] @ V[:, ~big].T)

    @property
    def dim(self):
        return self.q.size

    def eval(self, x):
        x = _rows(x, self.dim)
        return _out(np.einsum("...i,ij,...j->...", x, self.Q, x) + x @ self.q + self.r)

    def subgradient(self, z):
        z = _rows(z, self.dim)
        return 2.0 * self.Q @ z + self.q

    def recession(self, x):
        x = _rows(x, self.dim)
        Qx = x @ self.Q
        scale = 1.0 + np.max(np.abs(x), axis=-1)
        flat = np.max(np.abs(Qx), axis=-1) <= REC_TOL * scale
        return _out(np.where(flat, x @ self.q, math.inf))

    def _center(self):
        """``(x_c, m0, bounded)``: minimizer, minimum and whether one exists."""
        bounded = bool(np.max(np.abs(self._null @ self.q), initial=0.0)
                       <= 1e-10 * (1.0 + np.max(np.abs(self.q), initial=0.0)))
        xc = -0.5 * self._Qpinv @ self.q
        m0 = self.r - 0.25 * float(self.q @ self._Qpinv @ self.q)
        return xc, m0, bounded

    def min_value(self):
        _, m0, bounded = self._center()
        return m0 if bounded else -math.inf

    def minus_affine(self, eta, const):
        return ConvexQuadratic(self.Q, self.q - np.asarray(eta, dtype=float), self.r - float(const))

    def to_dict(self):
        return {"family": "quadratic",
                "params": {"Q": self.Q.tolist(), "q": self.q.tolist(), "r": self.r}}


@dataclass(frozen=True, eq=False)
class AffinePlus(ConvexSpec):
    """``max(0, a@x + r)``."""

    a: np.ndarray
    r: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).ravel())
        object.__setattr__(self, "r", float(self.r))

    @property
    def dim(self):
        return self.a.size

    def eval(self, x):
        x = _rows(x, self.dim)
        return _out(np.maximum(0.0, x @ self.a + self.r))

    def subgradient(self, z):
        z = _rows(z, self.dim)
        return self.a.copy() if float(z @ self.a + self.r) > 0 else np.zeros(self.dim)

    def recession(self, x):
        x = _rows(x, self.dim)
        return _out(np.maximum(0.0, x @ self.a))

    def min_value(self):
        return 0.0

    def minus_affine(self, eta, const):
        eta = np.asarray(eta, dtype=float)
        if not np.any(eta):
            if const != 0.0:
                raise ValueError("AffinePlus minus a nonzero constant is not an AffinePlus")
            return self
        if not np.allclose(eta, self.a, rtol=0, atol=1e-14):
            raise ValueError("AffinePlus can only drop its own slope")
        # max(0, s) - s = max(0, -s)  with  s = a@x + r, const = r
        if abs(float(const) - self.r) > 1e-12 * (1 + abs(self.r)):
            raise ValueError("AffinePlus minus its slope needs the matching constant")
        return AffinePlus(-self.a, -self.r)

    def to_dict(self):
        return {"family": "affine_plus", "params": {"a": self.a.tolist(), "r": self.r}}


@dataclass(frozen=True, eq=False)
class GaugeWrapped(ConvexSpec):
    """A catalogue gauge used as a convex block, minus an optional linear
    term: ``x -> g(x) - shift@x`` (``shift`` lies in the polar unit ball so
    the result stays nonnegative)."""

    gauge: GaugeSpec
    shift: np.ndarray | None = None

    def __post_init__(self):
        if self.shift is not None:
            s = np.asarray(self.shift, dtype=float).ravel()
            if s.size != self.gauge.dim:
                raise DimensionMismatch("shift length must match the gauge dimension")
            object.__setattr__(self, "shift", s if np.any(s) else None)

    @property
    def dim(self):
        return self.gauge.dim

    def _lin(self, x):
        return 0.0 if self.shift is None else x @ self.shift

    def eval(self, x):
        x = _rows(x, self.dim)
        return _out(np.asarray(self.gauge.eval(x)) - self._lin(x))

    def subgradient(self, z):
        z = _rows(z, self.dim)
        lin = np.zeros(self.dim) if self.shift is None else self.shift
        if not np.any(z):
            return -lin
        gz = float(self.gauge.eval(z))
        if not math.isfinite(gz):
            raise AnchorOutOfDomain("anchor outside the gauge domain")
        # a subgradient of g at z maximizes y@z over the polar unit ball
        pol = self.gauge.polar_spec()
        if isinstance(pol, Polar) or not getattr(pol, "vanishes_only_at_zero", False):
            raise AnchorOutOfDomain(f"no subgradient oracle for {type(self.gauge).__name__} at z != 0")
        y = pol.support_argmax(z).x_bar
        return y - lin

    def recession(self, x):
        return self.eval(x)

    def min_value(self):
        return 0.0

    def minus_affine(self, eta, const):
        if abs(float(const)) > 1e-12:
            raise ValueError("a gauge block has no constant part")
        base = np.zeros(self.dim) if self.shift is None else self.shift
        return GaugeWrapped(self.gauge, base + np.asarray(eta, dtype=float))

    def to_dict(self):
        params = {"gauge": self.gauge.to_dict()}
        if self.shift is not None:
            params["shift"] = self.shift.tolist()
        return {"family": "gauge", "params": params}


def convex_from_dict(d: dict) -> ConvexSpec:
    try:
        family, params = d["family"], d.get("params", {})
        if family == "quadratic":
            return ConvexQuadratic(np.array(params["Q"], dtype=float),
                                   np.array(params["q"], dtype=float), float(params.get("r", 0.0)))
        if family == "affine_plus":
            return AffinePlus(np.array(params["a"], dtype=float), float(params.get("r", 0.0)))
        if family == "gauge":
            shift = params.get("shift")
            return GaugeWrapped(gauge_from_dict(params["gauge"]),
                                None if shift is None else np.array(shift, dtype=float))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad convex block {d!r}") from exc
    raise SchemaError(f"unknown convex family {family!r}")


# ------------------------------------------------------------ decomposition

@dataclass
class Decomposition:
    """``f(x) = nonneg_part(x) + eta@x + const``."""

    anchor: np.ndarray
    eta: np.ndarray
    nonneg_part: ConvexSpec
    const: float

    @property
    def linear_part(self):
        return self.eta, self.const

    def linear(self, x):
        return np.asarray(x, dtype=float) @ self.eta + self.const


def decompose(f: ConvexSpec, z) -> Decomposition:
    """Split ``f`` at anchor ``z`` into a nonnegative convex part and an
    affine part."""
    z = np.asarray(z, dtype=float).ravel()
    if z.size != f.dim:
        raise DimensionMismatch(f"anchor has length {z.size}, expected {f.dim}")
    fz = float(f.eval(z))
    if not math.isfinite(fz):
        raise AnchorOutOfDomain(f"f(z) = {fz}")
    eta = f.subgradient(z)
    const = fz - float(eta @ z)
    return Decomposition(z, eta, f.minus_affine(eta, const), const)


# ------------------------------------------------------------ perspective gauge

@dataclass(frozen=True, eq=False)
class PerspectiveGauge(GaugeSpec):
    """Closed perspective of a nonnegative convex spec on ``(x, zeta)``;
    the last coordinate is ``zeta``."""

    source: ConvexSpec

    @property
    def dim(self):
        return self.source.dim + 1

    @property
    def full_domain(self):
        return False

    def eval(self, xz):
        xz = self._check(xz)
        x, zeta = xz[..., :-1], xz[..., -1]
        pos = zeta > 0
        safe = np.where(pos, zeta, 1.0)
        with np.errstate(over="ignore", invalid="ignore"):
            scaled = safe * np.asarray(self.source.eval(x / safe[..., None]), dtype=float)
        rec = np.asarray(self.source.recession(x), dtype=float)
        out = np.where(pos, scaled, np.where(zeta == 0, rec, math.inf))
        return _out(out)

    def polar(self, yw):
        yw = self._check(yw)
        flat = yw.reshape(-1, self.dim)
        vals = np.array([self._polar_one(r[:-1], float(r[-1])) for r in flat])
        return _out(vals.reshape(yw.shape[:-1]))

    def _polar_one(self, y, w) -> float:
        h = self.source
        if isinstance(h, ConvexQuadratic):
            return _quad_persp_polar(h, y, w)
        if isinstance(h, AffinePlus):
            return _affine_persp_polar(h, y, w)
        if isinstance(h, GaugeWrapped):
            if w > 0:
                return math.inf
            if h.shift is None:
                return float(h.gauge.polar(y))
            return _shifted_gauge_polar(h.gauge, h.shift, y)
        raise NotImplementedError(type(h).__name__)

    def polar_spec(self):
        return Polar(self)

    @property
    def vanishes_only_at_zero(self):
        h = self.source
        if isinstance(h, ConvexQuadratic):
            _, m0, bounded = h._center()
            return bool(bounded and m0 > 0 and np.linalg.eigvalsh(h.Q).min() > 1e-12)
        return False

    @property
    def not_identically_zero(self):
        h = self.source
        if isinstance(h, AffinePlus):
            return bool(np.any(h.a) or h.r > 0)
        if isinstance(h, ConvexQuadratic):
            return bool(np.any(h.Q) or np.any(h.q) or h.r != 0)
        return True

    def nonzero_direction(self):
        e = np.zeros(self.dim)
        e[-1] = 1.0
        if float(self.eval(e)) > 0:
            return e
        for j in range(self.dim - 1):
            for s in (1.0, -1.0):
                e = np.zeros(self.dim)
                e[j], e[-1] = s, 1.0
                if 0 < float(self.eval(e)) < math.inf:
                    return e
        return e

    def to_dict(self):
        return {"family": "perspective", "params": {"of": self.source.to_dict()}}


def eval_perspective(pg: PerspectiveGauge, x, zeta) -> float:
    x = np.asarray(x, dtype=float).ravel()
    return float(pg.eval(np.concatenate([x, [float(zeta)]])))


def _quad_persp_polar(h: ConvexQuadratic, y, w) -> float:
    """Polar of the perspective of a nonnegative convex quadratic.

    With minimizer ``x_c`` and minimum ``m0`` the support value of the
    level set ``{h <= t}`` is ``y@x_c + sqrt((t - m0) s)``, ``s = y@Q^+@y``
    (``+inf`` unless ``y`` is orthogonal to ``null(Q)``).  Maximizing
    ``zeta*w + zeta*support(1/zeta)`` over ``0 < zeta <= 1/m0`` is a
    sinusoid in disguise and gives the closed forms below.
    """
    xc, m0, bounded = h._center()
    if not bounded or m0 < -1e-9:
        raise NegativeFunctionValueDetected("quadratic block is negative somewhere")
    # a decomposed block has minimum exactly 0; do not let rounding decide
    if m0 <= 1e-12 * (1.0 + abs(h.r) + float(np.max(np.abs(h.q), initial=0.0)) ** 2):
        m0 = 0.0
    y = np.asarray(y, dtype=float)
    if np.max(np.abs(h._null @ y), initial=0.0) > 1e-10 * (1.0 + np.max(np.abs(y), initial=0.0)):
        return math.inf
    s = max(float(y @ h._Qpinv @ y), 0.0)
    L = w + float(y @ xc)
    if L < 0:
        # (L + sqrt(L^2 + s m0)) / (2 m0), rationalized so m0 -> 0 is exact
        return float(s / (2.0 * (-L + math.sqrt(L * L + s * m0))))
    if m0 == 0.0:
        return 0.0 if (L == 0 and s == 0) else math.inf
    return float((L + math.sqrt(L * L + s * m0)) / (2.0 * m0))


def quad_persp_polar_numeric(h: ConvexQuadratic, y, w) -> float:
    """Same value by 1-D maximization over ``zeta`` (for checks).

    A log-spaced scan locates the bracket, bounded Brent search refines it.
    """
    xc, m0, _ = h._center()
    y = np.asarray(y, dtype=float)
    s = max(float(y @ h._Qpinv @ y), 0.0)
    L = w + float(y @ xc)
    top = 1.0 / m0 if m0 > 0 else 1e12

    def f(z):
        return L * z + math.sqrt(max(z - m0 * z * z, 0.0) * s)

    zs = np.geomspace(top * 1e-24, top, 481)
    vals = np.array([f(z) for z in zs])
    j = int(np.argmax(vals))
    lo, hi = zs[max(j - 1, 0)], zs[min(j + 1, zs.size - 1)]
    res = minimize_scalar(lambda z: -f(z), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14 * hi})
    return float(max(-res.fun, vals[j], 0.0))


def _affine_persp_polar(h: AffinePlus, y, w) -> float:
    """``sup{y@x + w*zeta : a@x + r*zeta <= 1, zeta >= 0}`` by LP."""
    from .solve.lp import solve_lp
    n = h.dim
    c = -np.concatenate([y, [w]])
    A_ub = np.concatenate([h.a, [h.r]])[None, :]
    bounds = [(None, None)] * n + [(0.0, None)]
    res = solve_lp(c, A_ub=A_ub, b_ub=[1.0], bounds=bounds, raise_on_failure=False)
    if res.status == "unbounded":
        return math.inf
    return float(max(-res.objective, 0.0))


def _shifted_gauge_polar(g: GaugeSpec, eta, y, tol=1e-13) -> float:
    """``sup{y@x : g(x) - eta@x <= 1}`` as ``min{lam >= 0 : g°(y + lam eta) <= lam}``."""
    def psi(lam):
        return float(g.polar(y + lam * eta)) - lam

    if psi(0.0) <= 0:
        return 0.0
    hi = 1.0
    while psi(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            # psi is convex; look for a dip before giving up
            res = minimize_scalar(psi, bounds=(0.0, 1e12), method="bounded")
            if res.fun > 0:
                return math.inf
            hi = float(res.x)
            break
    return float(brentq(psi, 0.0, hi, xtol=tol * max(1.0, hi), rtol=4 * np.finfo(float).eps))


# ------------------------------------------------------------ lifted problem

@dataclass
class PerspectiveProblem:
    lifted: Problem
    source: Problem
    decompositions: list | None = None
    #: constant dropped when linear parts were folded into the data
    offset: float = 0.0
    row_kinds: list = field(default_factory=list)
    #: positions of the x coordinates and of each zeta inside z
    x_index: np.ndarray = None
    zeta_index: np.ndarray = None

    def lift(self, x, zeta=None) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        zeta = np.ones(self.source.m) if zeta is None else np.asarray(zeta, dtype=float).ravel()
        z = np.zeros(self.lifted.n)
        z[self.x_index] = x
        z[self.zeta_index] = zeta
        return z

    def unlift(self, z):
        z = np.asarray(z, dtype=float)
        return z[..., self.x_index], z[..., self.zeta_index]

    def source_objective(self, x) -> float:
        """Objective of the original (undecomposed) problem at ``x``."""
        return float(self.lifted_objective(self.lift(x)) + self.offset)

    def lifted_objective(self, z) -> float:
        pb = self.lifted
        g = pb.gauge.eval(np.asarray(z, dtype=float))
        if not np.all(np.isfinite(g)):
            return math.inf
        return float(pb.c @ z + pb.d @ g)


def _check_nonnegative(prob: Problem, rng=None, samples: int = 200):
    rng = np.random.default_rng(0) if rng is None else rng
    for i, spec in enumerate(prob.specs):
        mv = spec.min_value()
        if mv < -1e-9:
            raise NegativeFunctionValueDetected(f"block {i} reaches {mv:.6g} < 0; decompose it first")
        X = rng.normal(size=(samples, spec.dim)) * 3.0
        vals = np.asarray(spec.eval(X))
        if np.min(vals) < -1e-9:
            raise NegativeFunctionValueDetected(f"block {i} takes value {np.min(vals):.6g} < 0")


def fold_decompositions(prob: Problem, anchors) -> tuple[Problem, list, float]:
    """Decompose every block at its anchor and fold the linear parts into
    ``c``, ``H`` and ``p``.  Returns ``(problem with nonnegative blocks,
    decompositions, objective offset)``."""
    blocks = prob.partition.blocks
    if len(anchors) != prob.m:
        raise DimensionMismatch("one anchor per block required")
    decs = [decompose(spec, z) for spec, z in zip(prob.specs, anchors)]
    c = prob.c.copy()
    H = prob.H.copy()
    p = prob.p.copy()
    offset = 0.0
    for i, (dec, blk) in enumerate(zip(decs, blocks)):
        c[blk] += prob.d[i] * dec.eta
        offset += prob.d[i] * dec.const
        if prob.l:
            H[:, blk] += np.outer(prob.K[:, i], dec.eta)
            p -= prob.K[:, i] * dec.const
    gauge = VectorGauge(prob.partition, tuple(dec.nonneg_part for dec in decs))
    folded = Problem(c=c, d=prob.d, b=prob.b, p=p, A=prob.A, B=prob.B, H=H, K=prob.K,
                     gauge=gauge, kind="convex")
    return folded, decs, offset


def build_perspective_problem(pf: Problem, anchors=None) -> PerspectiveProblem:
    """Lift a problem with nonnegative convex blocks to a gauge problem.

    With ``anchors`` every block is first decomposed at its anchor and the
    linear parts are folded into the data (the constant goes to
    ``offset``).  Without anchors the blocks must already be nonnegative.
    """
    if np.any(pf.B):
        raise ValueError("the perspective construction needs B = 0")
    decs, offset = None, 0.0
    src = pf
    if anchors is not None:
        pf, decs, offset = fold_decompositions(pf, anchors)
    else:
        _check_nonnegative(pf)
    blocks = pf.partition.blocks
    n, m, k = pf.n, pf.m, pf.k

    # z = (x_I1, zeta_1, ..., x_Im, zeta_m)
    x_index = np.zeros(n, dtype=int)
    zeta_index = np.zeros(m, dtype=int)
    lifted_blocks = []
    pos = 0
    for i, blk in enumerate(blocks):
        x_index[blk] = np.arange(pos, pos + blk.size)
        zeta_index[i] = pos + blk.size
        lifted_blocks.append(np.arange(pos, pos + blk.size + 1))
        pos += blk.size + 1
    N = n + m

    rows, rhs, kinds = [], [], []
    for i in range(max(k, m)):
        if i < k:
            r = np.zeros(N)
            r[x_index] = pf.A[i]
            rows.append(r)
            rhs.append(pf.b[i])
            kinds.append(("eq", i))
        if i < m:
            r = np.zeros(N)
            r[zeta_index[i]] = 1.0
            rows.append(r)
            rhs.append(1.0)
            kinds.append(("pin", i))
    # interleaving above already appends the surplus rows in order
    c_hat = np.zeros(N)
    c_hat[x_index] = pf.c
    H_hat = np.zeros((pf.l, N))
    H_hat[:, x_index] = pf.H
    gauge = VectorGauge(BlockPartition(tuple(lifted_blocks)),
                        tuple(PerspectiveGauge(s) for s in pf.specs))
    lifted = Problem(c=c_hat, d=pf.d, b=np.array(rhs), p=pf.p, A=np.array(rows).reshape(-1, N),
                     B=None, H=H_hat, K=pf.K, gauge=gauge, kind="gauge")
    return PerspectiveProblem(lifted, src, decs, offset, kinds, x_index, zeta_index)


@dataclass
class PerspectiveDual:
    """The gauge dual of the lifted problem, with the multiplier of the
    pinning rows exposed as ``w``."""

    pp: PerspectiveProblem
    dual: DualProblem

    def join(self, u, v, w) -> DualPoint:
        uh = np.zeros(self.pp.lifted.k)
        for j, (kind, i) in enumerate(self.pp.row_kinds):
            uh[j] = u[i] if kind == "eq" else w[i]
        return DualPoint(uh, v)

    def split(self, dp: DualPoint):
        k, m = self.pp.source.k, self.pp.source.m
        u, w = np.zeros(k), np.zeros(m)
        for j, (kind, i) in enumerate(self.pp.row_kinds):
            (u if kind == "eq" else w)[i] = dp.u[j]
        return u, dp.v, w

    def objective(self, u, v, w) -> float:
        """``b@u - p@v + sum(w)``."""
        return self.dual.objective(self.join(u, v, w))

    def slack(self, u, v, w, tol: float = 1e-8):
        return self.dual.slack(self.join(u, v, w), tol)


def build_perspective_dual(pp: PerspectiveProblem) -> PerspectiveDual:
    return PerspectiveDual(pp, dualize(pp.lifted))


__all__ = [
    "ConvexSpec", "ConvexQuadratic", "AffinePlus", "GaugeWrapped", "convex_from_dict",
    "Decomposition", "decompose", "PerspectiveGauge", "eval_perspective",
    "quad_persp_polar_numeric", "PerspectiveProblem", "fold_decompositions",
    "build_perspective_problem", "PerspectiveDual", "build_perspective_dual",
]

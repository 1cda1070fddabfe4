"""Gauge functions, their polars and support (argmax) oracles.

A gauge is a convex, nonnegative, positively homogeneous function that
vanishes at the origin.  Every family here evaluates on arrays whose last
axis is the block coordinate, so ``g.eval(X)`` with ``X.shape == (N, n)``
returns ``N`` values.  Extended values are plain floats: ``math.inf`` stands
for ``+infinity``.

Polar pairs implemented in closed form::

    PNorm(p)            <->  PNorm(q),  1/p + 1/q = 1
    WeightedPNorm(p, w) <->  WeightedPNorm(q, 1/w)
    Scaled(a, g)        <->  Scaled(1/a, polar(g))
    indicator of C      <->  indicator of the polar cone

``PolyhedralGauge`` polars are computed by linear programming.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import nnls

from .errors import Assumption5Violated, DimensionMismatch, SchemaError

TOL = 1e-9

__all__ = [
    "GaugeSpec", "PNorm", "WeightedPNorm", "Scaled", "PolyhedralGauge",
    "ConeIndicator", "Orthant", "PolyhedralCone", "GeneratedCone", "Polar",
    "SupportResult", "eval", "eval_polar", "support_argmax", "polar_spec",
    "holder_product", "conjugate_exponent", "gauge_from_dict",
]


class SupportResult(NamedTuple):
    x_bar: np.ndarray
    on_unit_sphere: bool


def conjugate_exponent(p: float) -> float:
    p = float(p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def holder_product(a: float, b: float) -> float:
    """Product of two extended nonnegative reals with ``0 * inf = inf``."""
    if math.isinf(a) or math.isinf(b):
        return math.inf
    return a * b


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _encode_float(v: float):
    return "inf" if math.isinf(v) else float(v)


def _decode_float(v) -> float:
    if isinstance(v, str):
        if v.lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise SchemaError(f"bad numeric value {v!r}")
    return float(v)


def _out(vals):
    vals = np.asarray(vals, dtype=float)
    return float(vals) if vals.ndim == 0 else vals


class GaugeSpec:
    """Common interface of the gauge catalogue."""

    dim: int
    #: effective domain is the whole space
    full_domain: bool = True

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise DimensionMismatch(
                f"{type(self).__name__} expects last dimension {self.dim}, got shape {x.shape}")
        return x

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        raise NotImplementedError

    def polar(self, y):
        raise NotImplementedError

    def polar_spec(self) -> "GaugeSpec":
        raise NotImplementedError

    @property
    def vanishes_only_at_zero(self) -> bool:
        """True when ``g(x) = 0`` forces ``x = 0`` (bounded unit ball)."""
        raise NotImplementedError

    @property
    def satisfies_assumption5(self) -> bool:
        return self.vanishes_only_at_zero

    @property
    def not_identically_zero(self) -> bool:
        return True

    def support_argmax(self, alpha) -> SupportResult:
        alpha = self._check(alpha)
        if not self.vanishes_only_at_zero:
            raise Assumption5Violated(
                f"{type(self).__name__} does not vanish only at 0; its unit ball is unbounded")
        if not np.any(alpha):
            return SupportResult(np.zeros(self.dim), False)
        x = self._argmax(alpha)
        return SupportResult(x, bool(abs(self.eval(x) - 1.0) <= TOL))

    def _argmax(self, alpha) -> np.ndarray:
        raise NotImplementedError

    def support_argmax_batch(self, alphas) -> np.ndarray:
        """Row-wise :meth:`support_argmax` maximizers (zero rows give zero)."""
        alphas = np.atleast_2d(self._check(alphas))
        return np.array([self.support_argmax(a).x_bar for a in alphas])

    def support_face(self, alpha, tol: float = 1e-7) -> np.ndarray | None:
        """Vertices spanning the maximizer set of ``alpha @ x`` over the unit ball.

        Returns an array of shape ``(r, dim)``, or ``None`` when the face is
        not a polytope with a small vertex list (e.g. the whole Euclidean
        ball when ``alpha = 0``).
        """
        alpha = self._check(alpha)
        if np.max(np.abs(alpha)) <= tol:
            return None
        return self.support_argmax(alpha).x_bar[None, :]

    def recession_ray(self, alpha) -> np.ndarray | None:
        """A direction ``r`` with ``g(r) = 0`` and ``alpha @ r > 0``, if any.

        Such a ray exists exactly when the polar at ``alpha`` is infinite.
        """
        return None

    def nonzero_direction(self) -> np.ndarray:
        """Some ``x`` with ``g(x) > 0`` (needs ``not_identically_zero``)."""
        return np.eye(self.dim)[0]

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PNorm(GaugeSpec):
    """The l_p norm on ``R^dim``, ``1 <= p <= inf``."""

    p: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "dim", int(self.dim))
        if not self.p >= 1.0:
            raise ValueError(f"PNorm needs p >= 1, got {self.p}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def eval(self, x):
        x = self._check(x)
        return _out(_pnorm(x, self.p))

    def polar(self, y):
        y = self._check(y)
        return _out(_pnorm(y, conjugate_exponent(self.p)))

    def polar_spec(self):
        return PNorm(conjugate_exponent(self.p), self.dim)

    @property
    def vanishes_only_at_zero(self):
        return True

    def _argmax(self, alpha):
        return _pnorm_argmax(alpha, self.p)

    def support_argmax_batch(self, alphas):
        return _pnorm_argmax_batch(np.atleast_2d(self._check(alphas)), self.p)

    def support_face(self, alpha, tol=1e-7):
        alpha = self._check(alpha)
        return _pnorm_face(alpha, self.p, tol)

    def nonzero_direction(self):
        return np.eye(self.dim)[0]

    def to_dict(self):
        return {"family": "pnorm", "params": {"p": _encode_float(self.p), "n": self.dim}}


@dataclass(frozen=True, eq=False)
class WeightedPNorm(GaugeSpec):
    """``g(x) = || w * x ||_p`` with positive weights ``w``."""

    p: float
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        w = _frozen(self.w).ravel()
        if w.size == 0 or np.any(w <= 0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "w", w)
        if not self.p >= 1.0:
            raise ValueError(f"WeightedPNorm needs p >= 1, got {self.p}")

    @property
    def dim(self):
        return self.w.size

    def eval(self, x):
        x = self._check(x)
        return _out(_pnorm(x * self.w, self.p))

    def polar(self, y):
        y = self._check(y)
        return _out(_pnorm(y / self.w, conjugate_exponent(self.p)))

    def polar_spec(self):
        return WeightedPNorm(conjugate_exponent(self.p), 1.0 / self.w)

    @property
    def vanishes_only_at_zero(self):
        return True

    def _argmax(self, alpha):
        return _pnorm_argmax(alpha / self.w, self.p) / self.w

    def support_argmax_batch(self, alphas):
        alphas = np.atleast_2d(self._check(alphas))
        return _pnorm_argmax_batch(alphas / self.w, self.p) / self.w

    def support_face(self, alpha, tol=1e-7):
        alpha = self._check(alpha)
        face = _pnorm_face(alpha / self.w, self.p, tol)
        return None if face is None else face / self.w

    def to_dict(self):
        return {"family": "weighted_pnorm",
                "params": {"p": _encode_float(self.p), "w": self.w.tolist()}}


@dataclass(frozen=True, eq=False)
class Scaled(GaugeSpec):
    """``g(x) = alpha * inner(x)`` with ``alpha > 0``."""

    alpha: float
    inner: GaugeSpec

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        if not self.alpha > 0:
            raise ValueError("scale must be positive")

    @property
    def dim(self):
        return self.inner.dim

    @property
    def full_domain(self):
        return self.inner.full_domain

    def eval(self, x):
        return _scale_ext(self.alpha, self.inner.eval(x))

    def polar(self, y):
        return _scale_ext(1.0 / self.alpha, self.inner.polar(y))

    def polar_spec(self):
        return Scaled(1.0 / self.alpha, self.inner.polar_spec())

    @property
    def vanishes_only_at_zero(self):
        return self.inner.vanishes_only_at_zero

    @property
    def not_identically_zero(self):
        return self.inner.not_identically_zero

    def support_argmax(self, alpha):
        res = self.inner.support_argmax(alpha)
        x = res.x_bar / self.alpha
        if not np.any(x):
            return SupportResult(x, False)
        return SupportResult(x, bool(abs(self.eval(x) - 1.0) <= TOL))

    def support_argmax_batch(self, alphas):
        return self.inner.support_argmax_batch(alphas) / self.alpha

    def support_face(self, alpha, tol=1e-7):
        face = self.inner.support_face(alpha, tol)
        return None if face is None else face / self.alpha

    def recession_ray(self, alpha):
        return self.inner.recession_ray(alpha)

    def nonzero_direction(self):
        return self.inner.nonzero_direction()

    def to_dict(self):
        return {"family": "scaled",
                "params": {"alpha": self.alpha, "inner": self.inner.to_dict()}}


@dataclass(frozen=True, eq=False)
class PolyhedralGauge(GaugeSpec):
    """``g(x) = max(0, max_j a_j @ x)`` for generator rows ``a_j`` of ``G``."""

    G: np.ndarray

    def __post_init__(self):
        G = _frozen(self.G)
        if G.ndim != 2 or G.shape[0] == 0:
            raise ValueError("PolyhedralGauge needs a nonempty 2-d generator matrix")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "_spanning", _positively_spans(G))

    @property
    def dim(self):
        return self.G.shape[1]

    def eval(self, x):
        x = self._check(x)
        return _out(np.maximum(0.0, np.max(x @ self.G.T, axis=-1)))

    def polar(self, y):
        y = self._check(y)
        if y.ndim == 1:
            return self._polar_one(y)
        flat = y.reshape(-1, self.dim)
        return np.array([self._polar_one(r) for r in flat]).reshape(y.shape[:-1])

    def _polar_one(self, y) -> float:
        from .solve.lp import solve_lp
        # sup{ y@x : G x <= 1 }
        res = solve_lp(-y, A_ub=self.G, b_ub=np.ones(self.G.shape[0]), raise_on_failure=False)
        if res.status == "unbounded":
            return math.inf
        return max(0.0, -res.objective)

    def polar_spec(self):
        # the polar ball is conv({0} U {a_j}); exposed through the LP-backed wrapper
        return Polar(self)

    @property
    def vanishes_only_at_zero(self):
        return self._spanning

    @property
    def not_identically_zero(self):
        return bool(np.any(self.G))

    def _argmax(self, alpha):
        from .solve.lp import solve_lp
        res = solve_lp(-alpha, A_ub=self.G, b_ub=np.ones(self.G.shape[0]))
        return res.x

    def support_face(self, alpha, tol=1e-7):
        alpha = self._check(alpha)
        if np.max(np.abs(alpha)) <= tol:
            return None
        return self.support_argmax(alpha).x_bar[None, :]

    def recession_ray(self, alpha):
        from .solve.lp import solve_lp
        alpha = self._check(alpha)
        # max alpha@r  s.t.  G r <= 0,  -1 <= r <= 1
        res = solve_lp(-alpha, A_ub=self.G, b_ub=np.zeros(self.G.shape[0]),
                       bounds=(-1.0, 1.0))
        if -res.objective > TOL:
            return res.x
        return None

    def nonzero_direction(self):
        j = int(np.argmax(np.linalg.norm(self.G, axis=1)))
        return np.array(self.G[j])

    def to_dict(self):
        return {"family": "polyhedral", "params": {"G": self.G.tolist()}}


def _positively_spans(G) -> bool:
    """Do the rows of ``G`` positively span ``R^n``?"""
    from .solve.lp import solve_lp
    r, n = G.shape
    if np.linalg.matrix_rank(G) < n:
        return False
    # max t  s.t.  G^T w = 0,  w >= t,  t <= 1
    c = np.zeros(r + 1)
    c[-1] = -1.0
    A_eq = np.hstack([G.T, np.zeros((n, 1))])
    A_ub = np.hstack([-np.eye(r), np.ones((r, 1))])
    bounds = [(0, None)] * r + [(None, 1.0)]
    res = solve_lp(c, A_eq=A_eq, b_eq=np.zeros(n), A_ub=A_ub, b_ub=np.zeros(r), bounds=bounds)
    return -res.objective > 1e-9


# ---------------------------------------------------------------- cones

@dataclass(frozen=True, eq=False)
class Orthant:
    """The nonnegative orthant ``{x : x >= 0}``."""

    dim: int

    def contains(self, x, tol=TOL):
        return np.all(np.asarray(x) >= -tol, axis=-1)

    def polar(self):
        return PolyhedralCone(np.eye(self.dim))

    def ray_with_positive_inner(self, alpha):
        j = int(np.argmax(alpha))
        if alpha[j] <= TOL:
            return None
        return np.eye(self.dim)[j]

    def to_dict(self):
        return {"type": "orthant", "n": self.dim}


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """``{x : M x <= 0}``."""

    M: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", _frozen(np.atleast_2d(self.M)))

    @property
    def dim(self):
        return self.M.shape[1]

    def contains(self, x, tol=TOL):
        return np.all(np.asarray(x) @ self.M.T <= tol, axis=-1)

    def polar(self):
        return GeneratedCone(self.M)

    def ray_with_positive_inner(self, alpha):
        from .solve.lp import solve_lp
        res = solve_lp(-np.asarray(alpha), A_ub=self.M, b_ub=np.zeros(self.M.shape[0]),
                       bounds=(-1.0, 1.0))
        return res.x if -res.objective > TOL else None

    def to_dict(self):
        return {"type": "polyhedral", "M": self.M.tolist()}


@dataclass(frozen=True, eq=False)
class GeneratedCone:
    """Conic hull of the rows of ``R``."""

    R: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", _frozen(np.atleast_2d(self.R)))

    @property
    def dim(self):
        return self.R.shape[1]

    def contains(self, x, tol=TOL):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, self.dim)
        out = np.empty(flat.shape[0], dtype=bool)
        for i, row in enumerate(flat):
            _, resid = nnls(self.R.T, row)
            out[i] = resid <= tol * max(1.0, np.linalg.norm(row))
        return out.reshape(x.shape[:-1]) if x.ndim > 1 else bool(out[0])

    def polar(self):
        return PolyhedralCone(self.R)

    def ray_with_positive_inner(self, alpha):
        vals = self.R @ np.asarray(alpha)
        j = int(np.argmax(vals))
        return np.array(self.R[j]) if vals[j] > TOL else None

    def to_dict(self):
        return {"type": "generated", "R": self.R.tolist()}


def _cone_from_dict(d):
    kind = d.get("type")
    if kind == "orthant":
        return Orthant(int(d["n"]))
    if kind == "polyhedral":
        return PolyhedralCone(np.array(d["M"], dtype=float))
    if kind == "generated":
        return GeneratedCone(np.array(d["R"], dtype=float))
    raise SchemaError(f"unknown cone type {kind!r}")


@dataclass(frozen=True, eq=False)
class ConeIndicator(GaugeSpec):
    """Indicator of a closed convex cone: 0 on the cone, +inf elsewhere."""

    cone: object
    full_domain = False

    @property
    def dim(self):
        return self.cone.dim

    def eval(self, x):
        x = self._check(x)
        return _out(np.where(self.cone.contains(x), 0.0, math.inf))

    def polar(self, y):
        y = self._check(y)
        return _out(np.where(self.cone.polar().contains(y), 0.0, math.inf))

    def polar_spec(self):
        return ConeIndicator(self.cone.polar())

    @property
    def vanishes_only_at_zero(self):
        return False

    @property
    def not_identically_zero(self):
        return False

    def recession_ray(self, alpha):
        alpha = self._check(alpha)
        return self.cone.ray_with_positive_inner(alpha)

    def to_dict(self):
        return {"family": "cone_indicator", "params": {"cone": self.cone.to_dict()}}


@dataclass(frozen=True, eq=False)
class Polar(GaugeSpec):
    """The polar of ``inner``, evaluated through ``inner.polar``.

    Used for gauges whose polar has no catalogue closed form.  For closed
    gauges the polar of this wrapper is ``inner`` itself.
    """

    inner: GaugeSpec

    @property
    def dim(self):
        return self.inner.dim

    @property
    def full_domain(self):
        return False

    def eval(self, x):
        return self.inner.polar(x)

    def polar(self, y):
        return self.inner.eval(y)

    def polar_spec(self):
        return self.inner

    @property
    def vanishes_only_at_zero(self):
        return False

    def to_dict(self):
        return {"family": "polar", "params": {"of": self.inner.to_dict()}}


# ------------------------------------------------------------ helpers

def _scale_ext(a, v):
    v = np.asarray(v, dtype=float)
    return _out(np.where(np.isinf(v), math.inf, a * np.where(np.isinf(v), 0.0, v)))


def _pnorm(x, p):
    ax = np.abs(x)
    if math.isinf(p):
        return np.max(ax, axis=-1)
    if p == 1.0:
        return np.sum(ax, axis=-1)
    if p == 2.0:
        return np.sqrt(np.sum(ax * ax, axis=-1))
    scale = np.max(ax, axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    return (scale * np.sum((ax / safe) ** p, axis=-1, keepdims=True) ** (1.0 / p))[..., 0]


def _pnorm_argmax(alpha, p):
    n = alpha.size
    if p == 1.0:
        j = int(np.argmax(np.abs(alpha)))  # lowest index among ties
        x = np.zeros(n)
        x[j] = 1.0 if alpha[j] > 0 else -1.0
        return x
    if math.isinf(p):
        return np.where(alpha < 0, -1.0, 1.0)
    q = conjugate_exponent(p)
    a = alpha / np.max(np.abs(alpha))
    mag = np.abs(a) ** (q - 1.0)
    x = np.sign(a) * mag
    return x / _pnorm(x, p)


def _pnorm_argmax_batch(alphas, p):
    R, n = alphas.shape
    amax = np.max(np.abs(alphas), axis=1)
    nz = amax > 0
    out = np.zeros((R, n))
    if p == 1.0:
        j = np.argmax(np.abs(alphas), axis=1)
        rows = np.arange(R)
        out[rows, j] = np.where(alphas[rows, j] > 0, 1.0, -1.0)
    elif math.isinf(p):
        out = np.where(alphas < 0, -1.0, 1.0)
    else:
        q = conjugate_exponent(p)
        a = alphas / np.where(nz, amax, 1.0)[:, None]
        x = np.sign(a) * np.abs(a) ** (q - 1.0)
        norms = _pnorm(x, p)
        out = x / np.where(norms > 0, norms, 1.0)[:, None]
    out[~nz] = 0.0
    return out


def _pnorm_face(alpha, p, tol):
    n = alpha.size
    amax = np.max(np.abs(alpha))
    if amax <= tol:
        if p == 1.0:
            return np.vstack([np.eye(n), -np.eye(n)])
        if math.isinf(p) and n <= 12:
            return np.array(list(itertools.product((1.0, -1.0), repeat=n)))
        return None
    if p == 1.0:
        idx = np.flatnonzero(np.abs(alpha) >= amax - tol)
        rows = np.zeros((idx.size, n))
        rows[np.arange(idx.size), idx] = np.sign(alpha[idx])
        return rows
    if math.isinf(p):
        zero = np.flatnonzero(np.abs(alpha) <= tol)
        base = np.where(alpha < 0, -1.0, 1.0)
        if zero.size == 0:
            return base[None, :]
        if zero.size > 12:
            return None
        rows = []
        for signs in itertools.product((1.0, -1.0), repeat=zero.size):
            r = base.copy()
            r[zero] = signs
            rows.append(r)
        return np.array(rows)
    return _pnorm_argmax(alpha, p)[None, :]


# --------------------------------------------------- functional interface

def eval(g: GaugeSpec, x):
    """``g(x)``; ``+inf`` exactly when ``x`` is outside the domain."""
    return g.eval(x)


def eval_polar(g: GaugeSpec, y):
    """``sup { x @ y : g(x) <= 1 }``."""
    return g.polar(y)


def support_argmax(g: GaugeSpec, alpha) -> SupportResult:
    return g.support_argmax(alpha)


def polar_spec(g: GaugeSpec) -> GaugeSpec:
    return g.polar_spec()


def gauge_from_dict(d: dict) -> GaugeSpec:
    try:
        family = d["family"]
        params = d.get("params", {})
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad gauge entry {d!r}") from exc
    if family == "pnorm":
        return PNorm(_decode_float(params["p"]), int(params["n"]))
    if family == "weighted_pnorm":
        return WeightedPNorm(_decode_float(params["p"]), np.array(params["w"], dtype=float))
    if family == "scaled":
        return Scaled(float(params["alpha"]), gauge_from_dict(params["inner"]))
    if family == "polyhedral":
        return PolyhedralGauge(np.array(params["G"], dtype=float))
    if family == "cone_indicator":
        return ConeIndicator(_cone_from_dict(params["cone"]))
    if family == "polar":
        return Polar(gauge_from_dict(params["of"]))
    if family == "perspective":
        from .perspective import PerspectiveGauge, convex_from_dict
        return PerspectiveGauge(convex_from_dict(params["of"]))
    raise SchemaError(f"unknown gauge family {family!r}")

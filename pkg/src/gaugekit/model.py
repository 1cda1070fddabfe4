"""Primal problem data: block partition, vector gauge, feasibility.

The problem class covers both the general form with a nonlinear equality
term::

    min  c@x + d@G(x)
    s.t. A x + B G(x) = b
         H x + K G(x) <= p,    x in dom G

and the gauge form where ``B = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch

FEAS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BlockPartition:
    """Ordered disjoint index blocks ``I_1, ..., I_m`` covering ``0..n-1``."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(np.array(b, dtype=int).ravel() for b in self.blocks)
        for b in blocks:
            b.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("partition needs at least one block")
        if any(b.size == 0 for b in blocks):
            raise ValueError("empty block in partition")
        allidx = np.concatenate(blocks)
        n = allidx.size
        if np.unique(allidx).size != n:
            raise ValueError("blocks overlap")
        if allidx.min() != 0 or allidx.max() != n - 1:
            raise ValueError(f"blocks must cover 0..{n - 1}")

    @classmethod
    def contiguous(cls, sizes: Sequence[int]) -> "BlockPartition":
        edges = np.cumsum([0, *sizes])
        return cls(tuple(np.arange(edges[i], edges[i + 1]) for i in range(len(sizes))))

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return int(sum(b.size for b in self.blocks))

    @property
    def sizes(self) -> list[int]:
        return [int(b.size) for b in self.blocks]

    def split(self, x):
        x = np.asarray(x, dtype=float)
        return [x[..., b] for b in self.blocks]

    def assemble(self, parts) -> np.ndarray:
        parts = [np.asarray(q, dtype=float) for q in parts]
        lead = parts[0].shape[:-1]
        x = np.zeros(lead + (self.n,))
        for b, q in zip(self.blocks, parts):
            x[..., b] = q
        return x


@dataclass(frozen=True, eq=False)
class VectorGauge:
    """Blockwise stack ``(g_1(x_I1), ..., g_m(x_Im))``.

    ``specs`` may hold any objects with ``dim`` and a batched ``eval``; the
    gauge catalogue, convex specs and perspective gauges all qualify.
    """

    partition: BlockPartition
    specs: tuple

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        if len(self.specs) != self.partition.m:
            raise ValueError("one spec per block required")
        for i, (s, b) in enumerate(zip(self.specs, self.partition.blocks)):
            if s.dim != b.size:
                raise DimensionMismatch(f"block {i}: spec dim {s.dim} != block size {b.size}")

    @property
    def m(self):
        return self.partition.m

    @property
    def n(self):
        return self.partition.n

    def eval(self, x) -> np.ndarray:
        """Values of every block; supports a leading batch axis."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise DimensionMismatch(f"expected {self.n} coordinates, got {x.shape[-1]}")
        cols = [np.asarray(s.eval(x[..., b]), dtype=float)
                for s, b in zip(self.specs, self.partition.blocks)]
        return np.stack(cols, axis=-1)

    def polar(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.n:
            raise DimensionMismatch(f"expected {self.n} coordinates, got {y.shape[-1]}")
        cols = [np.asarray(s.polar(y[..., b]), dtype=float)
                for s, b in zip(self.specs, self.partition.blocks)]
        return np.stack(cols, axis=-1)

    def polar_gauge(self) -> "VectorGauge":
        return VectorGauge(self.partition, tuple(s.polar_spec() for s in self.specs))


def _vec(a, size, name):
    if a is None:
        return np.zeros(size)
    a = np.asarray(a, dtype=float).ravel()
    if size is not None and a.size != size:
        raise DimensionMismatch(f"{name} has length {a.size}, expected {size}")
    return a


def _mat(M, rows, cols, name):
    if M is None:
        return np.zeros((rows, cols))
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        M = M.reshape(rows if rows is not None else 0, cols)
    M = np.atleast_2d(M)
    if M.shape[1] != cols or (rows is not None and M.shape[0] != rows):
        raise DimensionMismatch(f"{name} has shape {M.shape}, expected ({rows}, {cols})")
    return M


@dataclass(frozen=True, eq=False)
class Problem:
    """Problem data ``(c, d, b, p, A, B, H, K)`` plus the vector gauge.

    ``kind`` is ``"gauge"`` (forces ``B = 0``), ``"pho"`` or ``"convex"``
    (blocks are general nonnegative convex functions).
    """

    c: np.ndarray
    d: np.ndarray
    b: np.ndarray
    p: np.ndarray
    A: np.ndarray
    B: np.ndarray
    H: np.ndarray
    K: np.ndarray
    gauge: VectorGauge
    kind: str = "gauge"

    @classmethod
    def build(cls, gauge: VectorGauge, c=None, d=None, A=None, b=None,
              H=None, K=None, p=None, B=None, kind="gauge") -> "Problem":
        """Fill omitted data with zeros of the right shape."""
        n, m = gauge.n, gauge.m
        A_ = _mat(A, None, n, "A") if A is not None else np.zeros((0, n))
        k = A_.shape[0]
        H_ = _mat(H, None, n, "H") if H is not None else np.zeros((0, n))
        ell = H_.shape[0]
        if H is None and K is not None:
            K_ = np.atleast_2d(np.asarray(K, dtype=float))
            ell = K_.shape[0]
            H_ = np.zeros((ell, n))
        return cls(
            c=_vec(c, n, "c"), d=_vec(d, m, "d"), b=_vec(b, k, "b"),
            p=_vec(p, ell, "p"), A=A_, B=_mat(B, k, m, "B"), H=H_,
            K=_mat(K, ell, m, "K"), gauge=gauge, kind=kind,
        )

    def __post_init__(self):
        n, m = self.gauge.n, self.gauge.m
        for name in ("c", "d", "b", "p"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).ravel())
        k, ell = self.b.size, self.p.size
        object.__setattr__(self, "A", _mat(self.A, k, n, "A"))
        object.__setattr__(self, "B", _mat(self.B, k, m, "B"))
        object.__setattr__(self, "H", _mat(self.H, ell, n, "H"))
        object.__setattr__(self, "K", _mat(self.K, ell, m, "K"))
        if self.c.size != n:
            raise DimensionMismatch(f"c has length {self.c.size}, expected {n}")
        if self.d.size != m:
            raise DimensionMismatch(f"d has length {self.d.size}, expected {m}")
        if self.kind not in ("gauge", "pho", "convex"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind == "gauge" and np.any(self.B):
            raise ValueError("gauge problems carry no nonlinear equality term (B must be 0)")
        for arr in (self.c, self.d, self.b, self.p, self.A, self.B, self.H, self.K):
            arr.setflags(write=False)

    # dimensions
    @property
    def n(self):
        return self.gauge.n

    @property
    def m(self):
        return self.gauge.m

    @property
    def k(self):
        return self.b.size

    @property
    def l(self):  # noqa: E743
        return self.p.size

    @property
    def partition(self):
        return self.gauge.partition

    @property
    def specs(self):
        return self.gauge.specs

    # assumption flags
    @property
    def is_convex(self) -> bool:
        """All entries of ``d`` and ``K`` nonnegative."""
        return bool(np.all(self.d >= 0) and np.all(self.K >= 0))

    def assumption2(self) -> list[bool]:
        """Per block: (a) nonneg d_i, zero B column, nonneg K column; or
        (b) full domain and not identically zero."""
        out = []
        for i, s in enumerate(self.specs):
            cond_a = self.d[i] >= 0 and not np.any(self.B[:, i]) and np.all(self.K[:, i] >= 0)
            cond_b = getattr(s, "full_domain", True) and getattr(s, "not_identically_zero", True)
            out.append(bool(cond_a or cond_b))
        return out

    def assumption5(self) -> list[bool]:
        return [bool(getattr(s, "vanishes_only_at_zero", False)) for s in self.specs]

    def replace(self, **kw) -> "Problem":
        fields = dict(c=self.c, d=self.d, b=self.b, p=self.p, A=self.A, B=self.B,
                      H=self.H, K=self.K, gauge=self.gauge, kind=self.kind)
        fields.update(kw)
        return Problem(**fields)


@dataclass(eq=False)
class PrimalPoint:
    """A primal point with its cached block gauge values."""

    x: np.ndarray
    gvals: np.ndarray = field(default=None)

    @classmethod
    def at(cls, prob: Problem, x) -> "PrimalPoint":
        x = np.asarray(x, dtype=float).ravel()
        if x.size != prob.n:
            raise DimensionMismatch(f"x has length {x.size}, expected {prob.n}")
        return cls(x, prob.gauge.eval(x))

    @property
    def in_domain(self) -> bool:
        return bool(np.all(np.isfinite(self.gvals)))


def as_point(prob: Problem, x) -> PrimalPoint:
    if isinstance(x, PrimalPoint):
        return x
    return PrimalPoint.at(prob, x)


@dataclass
class FeasReport:
    eq_residual: float
    ineq_violation: float
    in_domain: bool
    feasible: bool

    def to_dict(self):
        return {"eq_residual": self.eq_residual, "ineq_violation": self.ineq_violation,
                "in_domain": self.in_domain, "feasible": self.feasible}


def primal_objective(prob: Problem, pt) -> float:
    """``c@x + d@G(x)``, ``+inf`` off the domain."""
    pt = as_point(prob, pt)
    if not pt.in_domain:
        return math.inf
    return float(prob.c @ pt.x + prob.d @ pt.gvals)


def primal_feasibility(prob: Problem, pt, tol: float = FEAS_TOL) -> FeasReport:
    pt = as_point(prob, pt)
    if not pt.in_domain:
        return FeasReport(math.inf, math.inf, False, False)
    g = pt.gvals
    eq = 0.0
    if prob.k:
        eq = float(np.max(np.abs(prob.A @ pt.x + prob.B @ g - prob.b)))
    ineq = 0.0
    if prob.l:
        ineq = float(max(0.0, np.max(prob.H @ pt.x + prob.K @ g - prob.p)))
    return FeasReport(eq, ineq, True, eq <= tol and ineq <= tol)


def batch_objective(prob: Problem, X) -> np.ndarray:
    """Objective over rows of ``X``; ``+inf`` where a row leaves the domain."""
    X = np.atleast_2d(X)
    G = prob.gauge.eval(X)
    finite = np.all(np.isfinite(G), axis=-1)
    Gs = np.where(np.isfinite(G), G, 0.0)
    val = X @ prob.c + Gs @ prob.d
    return np.where(finite, val, np.inf)


def batch_violation(prob: Problem, X, equalities: bool = True) -> np.ndarray:
    """Largest inequality violation (0 when satisfied) and equality residual
    combined per row; ``+inf`` off the domain.  ``equalities=False`` skips
    the equality residual (for points built to satisfy it)."""
    X = np.atleast_2d(X)
    G = prob.gauge.eval(X)
    finite = np.all(np.isfinite(G), axis=-1)
    Gs = np.where(np.isfinite(G), G, 0.0)
    viol = np.zeros(X.shape[0])
    if prob.l:
        viol = np.maximum(viol, np.max(X @ prob.H.T + Gs @ prob.K.T - prob.p, axis=-1))
    if prob.k and equalities:
        viol = np.maximum(viol, np.max(np.abs(X @ prob.A.T + Gs @ prob.B.T - prob.b), axis=-1))
    return np.where(finite, viol, np.inf)

"""Vectors, norms and dual norms, feasible sets, and Euclidean projection.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to share across threads.
"""

from __future__ import annotations

import enum

import numpy as np

Vector = np.ndarray

# Absolute membership tolerance per constraint; absorbs round-off from
# projection arithmetic in double precision.
MEMBER_TOL = 1e-12


def as_vector(x) -> Vector:
    """Coerce ``x`` to a 1-D float64 array, rejecting NaN/Inf entries."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def check_same_dim(a: Vector, b: Vector) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


class Norm(enum.Enum):
    """Ambient norm choices; iterates live in the primal norm, gradients are
    measured in its dual."""

    EUCLIDEAN = "l2"
    L1 = "l1"
    LINF = "linf"

    @property
    def dual(self) -> "Norm":
        return _DUAL[self]


_DUAL = {
    Norm.EUCLIDEAN: Norm.EUCLIDEAN,
    Norm.L1: Norm.LINF,
    Norm.LINF: Norm.L1,
}


def norm_value(kind: Norm, x) -> float:
    x = as_vector(x)
    if kind is Norm.EUCLIDEAN:
        return float(np.linalg.norm(x))
    if kind is Norm.L1:
        return float(np.sum(np.abs(x)))
    return float(np.max(np.abs(x)))


def dual_norm(kind: Norm, y) -> float:
    """``max_{||x||=1} <x, y>`` where ``kind`` names the primal norm."""
    return norm_value(kind.dual, y)


class FeasibleSet:
    """Constraint geometry: membership, Euclidean projection, and (for
    bounded sets) linear minimization."""

    dim: int | None = None  # None means any dimension is accepted

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        raise NotImplementedError

    def project(self, x) -> Vector:
        raise NotImplementedError

    @property
    def diameter(self) -> float | None:
        """Euclidean diameter, when the set is bounded."""
        return None

    def lmo(self, g) -> Vector:
        """argmin over the set of ``<g, .>``; only bounded sets support it."""
        raise ValueError(f"{type(self).__name__} is unbounded: no linear minimizer")

    def _check_dim(self, x: Vector) -> None:
        if self.dim is not None and x.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: set dim {self.dim}, vector dim {x.shape[0]}")


class Unconstrained(FeasibleSet):
    """The whole space; projection is the identity."""

    def __init__(self, dim: int | None = None):
        self.dim = dim

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        self._check_dim(as_vector(x))
        return True

    def project(self, x) -> Vector:
        v = as_vector(x)
        self._check_dim(v)
        return v.copy()

    def __repr__(self):
        return "Unconstrained()"


class Ball(FeasibleSet):
    """Euclidean ball of given center and radius."""

    def __init__(self, center, radius: float):
        self.center = as_vector(center)
        if radius <= 0:
            raise ValueError("ball radius must be positive")
        self.radius = float(radius)
        self.dim = self.center.shape[0]

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        v = as_vector(x)
        self._check_dim(v)
        return float(np.linalg.norm(v - self.center)) <= self.radius + tol

    def project(self, x) -> Vector:
        v = as_vector(x)
        self._check_dim(v)
        d = v - self.center
        n = float(np.linalg.norm(d))
        if n <= self.radius:
            # includes the degenerate center point: return it unchanged
            return v.copy()
        return self.center + d * (self.radius / n)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def lmo(self, g) -> Vector:
        g = as_vector(g)
        self._check_dim(g)
        n = float(np.linalg.norm(g))
        if n == 0.0:
            return self.center.copy()
        return self.center - g * (self.radius / n)

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


class Box(FeasibleSet):
    """Axis-aligned box with per-coordinate bounds; projection clamps."""

    def __init__(self, lo, hi):
        self.lo = as_vector(lo)
        self.hi = as_vector(hi)
        check_same_dim(self.lo, self.hi)
        if np.any(self.lo > self.hi):
            raise ValueError("box lower bound exceeds upper bound")
        self.dim = self.lo.shape[0]

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        v = as_vector(x)
        self._check_dim(v)
        return bool(np.all(v >= self.lo - tol) and np.all(v <= self.hi + tol))

    def project(self, x) -> Vector:
        v = as_vector(x)
        self._check_dim(v)
        return np.clip(v, self.lo, self.hi)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def lmo(self, g) -> Vector:
        # per coordinate: lower bound when the objective coefficient is
        # non-negative, upper bound otherwise (deterministic at zero)
        g = as_vector(g)
        self._check_dim(g)
        return np.where(g >= 0, self.lo, self.hi).astype(float)

    def __repr__(self):
        return f"Box(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


class Simplex(FeasibleSet):
    """Probability simplex {x >= 0, sum(x) = 1} in the given dimension."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("simplex dimension must be >= 1")
        self.dim = int(dim)

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        v = as_vector(x)
        self._check_dim(v)
        return bool(np.all(v >= -tol) and abs(float(np.sum(v)) - 1.0) <= tol)

    def project(self, x) -> Vector:
        """Sort-then-threshold projection, O(n log n).

        Threshold-index ties break toward the larger support.
        """
        v = as_vector(x)
        self._check_dim(v)
        s = np.sort(v)[::-1]
        css = np.cumsum(s)
        rho = 1
        for j in range(self.dim):
            if s[j] + (1.0 - css[j]) / (j + 1) >= 0.0:
                rho = j + 1
        theta = (css[rho - 1] - 1.0) / rho
        return np.maximum(v - theta, 0.0)

    @property
    def diameter(self) -> float:
        # largest distance is between two vertices
        return float(np.sqrt(2.0)) if self.dim > 1 else 0.0

    def lmo(self, g) -> Vector:
        g = as_vector(g)
        self._check_dim(g)
        out = np.zeros(self.dim)
        out[int(np.argmin(g))] = 1.0  # argmin takes the lowest index on ties
        return out

    def uniform(self) -> Vector:
        return np.full(self.dim, 1.0 / self.dim)

    def __repr__(self):
        return f"Simplex({self.dim})"


def euclidean_project(feasible: FeasibleSet, x_prime) -> Vector:
    """argmin over the set of ``||x - x_prime||_2``."""
    return feasible.project(x_prime)


def pythagorean_gap(feasible: FeasibleSet, a, b_prime) -> float:
    """``<a - b, b' - b>`` with ``b`` the projection of ``b'``.

    Non-positive for any member ``a``: the supporting hyperplane at the
    projected point separates ``b'`` from the set.
    """
    a = as_vector(a)
    b_prime = as_vector(b_prime)
    check_same_dim(a, b_prime)
    if not feasible.member(a):
        raise ValueError("first argument must belong to the feasible set")
    b = feasible.project(b_prime)
    return float(np.dot(a - b, b_prime - b))

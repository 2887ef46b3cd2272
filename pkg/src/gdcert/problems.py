"""Analytic test problems with known constants, plus online adversaries.

Each problem exposes a value/gradient oracle together with whatever constants
are known analytically: a gradient bound G, strong convexity alpha, smoothness
beta, and minimizers over the supported feasible sets. Constrained minimizers
of the quadratics are computed once by a projected-gradient solve driven to
machine tolerance and cached on the instance.
"""

from __future__ import annotations

import numpy as np

from gdcert.core import (
    Ball,
    Box,
    FeasibleSet,
    Norm,
    Simplex,
    Unconstrained,
    Vector,
    as_vector,
    norm_value,
)


class Problem:
    """Convex objective with a gradient oracle and declared constants."""

    name: str = "problem"
    dim: int
    lipschitz_G: float | None = None
    strong_convexity_alpha: float | None = None
    smoothness_beta: float | None = None

    def value(self, x) -> float:
        raise NotImplementedError

    def gradient(self, x) -> Vector:
        raise NotImplementedError

    @property
    def kappa(self) -> float | None:
        a, b = self.strong_convexity_alpha, self.smoothness_beta
        if a and b:
            return b / a
        return None

    def minimizer_over(self, feasible: FeasibleSet) -> Vector:
        raise NotImplementedError

    def optimal_value_over(self, feasible: FeasibleSet) -> float:
        return self.value(self.minimizer_over(feasible))

    def sublevel_diameter(self, x0) -> float | None:
        """Largest distance to the minimizer within the {f <= f(x0)} sublevel
        set, when computable in closed form."""
        return None

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


def _projected_gradient_minimize(problem: Problem, feasible: FeasibleSet,
                                 x0: Vector, max_iter: int = 60000) -> Vector:
    """Drive a 1/beta projected-gradient iteration to fixed-point tolerance."""
    beta = problem.smoothness_beta
    if beta is None or beta <= 0:
        raise ValueError("projected-gradient solve needs a smoothness constant")
    x = feasible.project(x0)
    for _ in range(max_iter):
        x_next = feasible.project(x - problem.gradient(x) / beta)
        if float(np.max(np.abs(x_next - x))) <= 1e-16:
            return x_next
        x = x_next
    return x


class DiagQuadratic(Problem):
    """f(x) = 0.5 * sum_i q_i (x_i - s_i)^2 with a positive diagonal q.

    alpha = min(q), beta = max(q); the unconstrained minimizer is the shift
    and the optimal value there is 0.
    """

    def __init__(self, diag, shift, name: str = "quadratic"):
        self.diag = as_vector(diag)
        self.shift = as_vector(shift)
        if self.diag.shape != self.shift.shape:
            raise ValueError("diag and shift must share a dimension")
        if np.any(self.diag <= 0):
            raise ValueError("diagonal entries must be positive")
        self.dim = self.diag.shape[0]
        self.strong_convexity_alpha = float(np.min(self.diag))
        self.smoothness_beta = float(np.max(self.diag))
        self.name = name
        self._minimizers: dict[str, Vector] = {}

    def value(self, x) -> float:
        d = as_vector(x) - self.shift
        return 0.5 * float(np.dot(self.diag * d, d))

    def gradient(self, x) -> Vector:
        return self.diag * (as_vector(x) - self.shift)

    def minimizer_over(self, feasible: FeasibleSet) -> Vector:
        if isinstance(feasible, Unconstrained):
            return self.shift.copy()
        key = repr(feasible)
        if key not in self._minimizers:
            if feasible.member(self.shift):
                self._minimizers[key] = feasible.project(self.shift)
            else:
                self._minimizers[key] = _projected_gradient_minimize(
                    self, feasible, self.shift)
        return self._minimizers[key].copy()

    def sublevel_diameter(self, x0) -> float:
        # f(x) >= alpha/2 ||x - x*||^2, with equality along the min-curvature
        # axis, so the sublevel radius is exactly sqrt(2 f(x0) / alpha)
        return float(np.sqrt(2.0 * self.value(x0) / self.strong_convexity_alpha))


class LogSumExp(Problem):
    """f(x) = log sum_i exp(x_i): smooth (beta = 1) but not strongly convex.

    The function is unbounded below on the whole space, so only constrained
    minimizers exist; over the simplex the minimizer is the uniform point by
    symmetry, over a centered ball it sits on the boundary along -1, and over
    a box it is the all-lower-bounds corner (f is increasing per coordinate).
    """

    def __init__(self, dim: int, name: str = "logsumexp"):
        self.dim = int(dim)
        self.smoothness_beta = 1.0
        self.lipschitz_G = 1.0  # gradient is a probability vector
        self.name = name

    def value(self, x) -> float:
        v = as_vector(x)
        m = float(np.max(v))
        return m + float(np.log(np.sum(np.exp(v - m))))

    def gradient(self, x) -> Vector:
        v = as_vector(x)
        e = np.exp(v - np.max(v))
        return e / np.sum(e)

    def minimizer_over(self, feasible: FeasibleSet) -> Vector:
        if isinstance(feasible, Simplex):
            return feasible.uniform()
        if isinstance(feasible, Ball):
            d = np.full(self.dim, -1.0 / np.sqrt(self.dim))
            return feasible.center + feasible.radius * d
        if isinstance(feasible, Box):
            return feasible.lo.copy()
        raise ValueError("log-sum-exp has no unconstrained minimizer")


def make_diag_quadratic(diag, shift, name: str = "quadratic") -> DiagQuadratic:
    return DiagQuadratic(diag, shift, name=name)


class LinearLoss(Problem):
    """A single online round: f(x) = <ell, x>."""

    def __init__(self, ell):
        self.ell = as_vector(ell)
        self.dim = self.ell.shape[0]
        self.name = "linear"

    def value(self, x) -> float:
        return float(np.dot(self.ell, as_vector(x)))

    def gradient(self, x) -> Vector:
        as_vector(x)
        return self.ell.copy()

    def minimizer_over(self, feasible: FeasibleSet) -> Vector:
        return feasible.lmo(self.ell)


class OnlineAdversary:
    """Produces the round-t convex loss; gradients are uniformly bounded."""

    dim: int

    def next_loss(self, t: int, x) -> Problem:
        raise NotImplementedError

    def grad_bound(self, kind: Norm = Norm.EUCLIDEAN) -> float | None:
        """Uniform bound on the dual norm of every round gradient."""
        return None

    def comparator_over(self, feasible: FeasibleSet, T: int) -> Vector:
        """Best fixed point in hindsight over T rounds."""
        raise NotImplementedError

    @property
    def strongly_convex_alpha(self) -> float | None:
        return None


class FixedAdversary(OnlineAdversary):
    """Plays the same fixed objective every round."""

    def __init__(self, problem: Problem):
        self.problem = problem
        self.dim = problem.dim

    def next_loss(self, t: int, x) -> Problem:
        return self.problem

    def grad_bound(self, kind: Norm = Norm.EUCLIDEAN) -> float | None:
        return self.problem.lipschitz_G if kind is Norm.EUCLIDEAN else None

    def comparator_over(self, feasible: FeasibleSet, T: int) -> Vector:
        return self.problem.minimizer_over(feasible)

    @property
    def strongly_convex_alpha(self) -> float | None:
        return self.problem.strong_convexity_alpha


class ExpertsAdversary(OnlineAdversary):
    """Online linear optimization rounds f_t(x) = <ell_t, x>, entries in [0,1].

    Gradient bounds hold for both the Euclidean and the sup norm since each
    loss vector lies in the unit cube.
    """

    def __init__(self, rows):
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if rows.size and (np.min(rows) < 0.0 or np.max(rows) > 1.0):
            raise ValueError("loss entries must lie in [0, 1]")
        self.rows = rows
        self.dim = rows.shape[1]

    def row(self, t: int) -> Vector:
        return self.rows[t % self.rows.shape[0]].copy()

    def next_loss(self, t: int, x) -> Problem:
        return LinearLoss(self.row(t))

    def grad_bound(self, kind: Norm = Norm.EUCLIDEAN) -> float:
        return max(norm_value(kind.dual, r) for r in self.rows)

    def cumulative(self, T: int) -> Vector:
        total = np.zeros(self.dim)
        for t in range(T):
            total += self.row(t)
        return total

    def comparator_over(self, feasible: FeasibleSet, T: int) -> Vector:
        # rounds are linear, so the best fixed point is a linear minimizer
        return feasible.lmo(self.cumulative(T))


def make_experts_adversary(loss_matrix) -> ExpertsAdversary:
    return ExpertsAdversary(loss_matrix)


def make_alternating_experts(dim: int = 2) -> ExpertsAdversary:
    """Round-robin unit losses: expert t % dim pays 1, everyone else 0."""
    return ExpertsAdversary(np.eye(dim))


def gradient_check(problem: Problem, x, h: float) -> float:
    """Largest coordinatewise deviation of a central difference from the
    declared gradient, scaled by 1 + |gradient|."""
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    x = as_vector(x)
    g = problem.gradient(x)
    worst = 0.0
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        cd = (problem.value(x + e) - problem.value(x - e)) / (2.0 * h)
        worst = max(worst, abs(cd - g[i]) / (1.0 + abs(g[i])))
    return worst


# --- registry -------------------------------------------------------------

def _p1():
    return make_diag_quadratic([1.0], [0.0], name="p1")


def _p2():
    return make_diag_quadratic([1.0, 4.0], [0.0, 0.0], name="p2")


def _p3():
    return make_diag_quadratic([1.0, 100.0], [0.0, 0.0], name="p3")


def _lse3():
    return LogSumExp(3, name="lse3")


PROBLEMS = {
    "p1": _p1,
    "p2": _p2,
    "p3": _p3,
    "lse3": _lse3,
}

ADVERSARIES = {
    "experts-alt": lambda: make_alternating_experts(2),
}


def get_problem(problem_id: str) -> Problem:
    if problem_id not in PROBLEMS:
        raise KeyError(f"unknown problem id {problem_id!r}")
    return PROBLEMS[problem_id]()


def get_adversary(problem_id: str) -> OnlineAdversary:
    if problem_id in ADVERSARIES:
        return ADVERSARIES[problem_id]()
    return FixedAdversary(get_problem(problem_id))

"""Methods for smooth objectives: the 1/beta step, its projected variant,
Frank-Wolfe, well-conditioned descent, and the general-norm smooth step."""

from __future__ import annotations

import numpy as np

from gdcert.core import (
    FeasibleSet,
    Norm,
    Simplex,
    Unconstrained,
    Vector,
    as_vector,
    check_same_dim,
)
from gdcert.problems import Problem
from gdcert.trace import StepRecord, Trace


def smooth_gd_step(x, g, beta: float) -> Vector:
    """x - g / beta: the step size that extracts the full descent guarantee
    from beta-smoothness."""
    if beta <= 0:
        raise ValueError("smoothness constant must be positive")
    x = as_vector(x)
    g = as_vector(g)
    check_same_dim(x, g)
    return x - g / beta


def descent_lemma_gap(problem: Problem, x, beta: float) -> float:
    """f(x+) - [f(x) - ||grad||^2 / (2 beta)] after one smooth step.

    Non-positive for any beta-smooth objective.
    """
    x = as_vector(x)
    g = problem.gradient(x)
    x_next = smooth_gd_step(x, g, beta)
    bound = problem.value(x) - float(np.dot(g, g)) / (2.0 * beta)
    return problem.value(x_next) - bound


def projected_smooth_step(feasible: FeasibleSet, x, g, beta: float) -> Vector:
    return feasible.project(smooth_gd_step(x, g, beta))


def projected_smoothness_gap(feasible: FeasibleSet, problem: Problem, x, y,
                             beta: float) -> float:
    """Slack in the workhorse inequality of projected smooth descent.

    For the projected step x+ from x and any member y:
        f(x+) - f(y) <= beta <x - x+, x - y> - (beta/2) ||x - x+||^2.
    Returns LHS - RHS, which must be non-positive.
    """
    x = as_vector(x)
    y = as_vector(y)
    if not (feasible.member(x) and feasible.member(y)):
        raise ValueError("both points must belong to the feasible set")
    x_next = projected_smooth_step(feasible, x, problem.gradient(x), beta)
    lhs = problem.value(x_next) - problem.value(y)
    d = x - x_next
    rhs = beta * float(np.dot(d, x - y)) - 0.5 * beta * float(np.dot(d, d))
    return lhs - rhs


def lmo(feasible: FeasibleSet, g) -> Vector:
    """argmin over the set of <g, .>; rejects unbounded sets."""
    return feasible.lmo(g)


def frank_wolfe_step(feasible: FeasibleSet, x, g, eta_t: float) -> Vector:
    """(1 - eta) x + eta * lmo(g); feasible by convexity, no projection.

    eta above 1 would leave the set; eta = 0 keeps the point.
    """
    if not (0.0 <= eta_t <= 1.0):
        raise ValueError("Frank-Wolfe step size must lie in [0, 1]")
    x = as_vector(x)
    if not feasible.member(x):
        raise ValueError("current point must be feasible")
    return (1.0 - eta_t) * x + eta_t * feasible.lmo(g)


FW_SCHEDULES = {
    # classic 1/(t+1): yields the log-factor rate
    "fw-1t": lambda t: 1.0 / (t + 1.0),
    # 2/(t+2): drops the log factor (2/(t+1) would exceed 1 at t=0)
    "fw-2t": lambda t: 2.0 / (t + 2.0),
}


def run_smooth_gd(problem: Problem, x0, T: int,
                  feasible: FeasibleSet | None = None,
                  reference: Vector | None = None) -> Trace:
    """T steps of x <- Pi(x - grad/beta), recording values and gradients.

    ``reference`` overrides the comparator point used for gap bookkeeping;
    by default it is the problem's minimizer over the (possibly whole-space)
    feasible set.
    """
    if T < 1:
        raise ValueError("need at least one step")
    beta = problem.smoothness_beta
    if beta is None:
        raise ValueError("problem declares no smoothness constant")
    if feasible is None:
        feasible = Unconstrained(problem.dim)
    x = feasible.project(as_vector(x0))
    steps = []
    for t in range(T):
        g = problem.gradient(x)
        steps.append(StepRecord(t=t, x=x, f=problem.value(x), grad=g,
                                eta=1.0 / beta))
        raw = x - g / beta
        if not np.all(np.isfinite(raw)):
            raise FloatingPointError(f"iterate diverged at step {t}")
        x = feasible.project(raw)
    trace = Trace(steps=steps, final_x=x, final_f=problem.value(x))
    trace.meta["method"] = "smooth-gd"
    trace.constants["beta"] = beta
    _attach_reference(trace, problem, feasible, x0, reference)
    return trace


def run_frank_wolfe(problem: Problem, feasible: FeasibleSet, x0, T: int,
                    schedule: str = "fw-2t") -> Trace:
    """Conditional gradient descent with one of the named step schedules."""
    if schedule not in FW_SCHEDULES:
        raise KeyError(f"unknown Frank-Wolfe schedule {schedule!r}")
    eta_fn = FW_SCHEDULES[schedule]
    beta = problem.smoothness_beta
    if beta is None:
        raise ValueError("problem declares no smoothness constant")
    if feasible.diameter is None:
        raise ValueError("Frank-Wolfe needs a bounded feasible set")
    x = as_vector(x0)
    if not feasible.member(x):
        raise ValueError("starting point must be feasible")
    steps = []
    for t in range(T):
        g = problem.gradient(x)
        eta = eta_fn(t)
        steps.append(StepRecord(t=t, x=x, f=problem.value(x), grad=g, eta=eta))
        x = frank_wolfe_step(feasible, x, g, eta)
    trace = Trace(steps=steps, final_x=x, final_f=problem.value(x))
    trace.meta["method"] = "frank-wolfe"
    trace.meta["schedule"] = schedule
    trace.constants["beta"] = beta
    trace.constants["D"] = feasible.diameter
    _attach_reference(trace, problem, feasible, x0, None, diameter_from_set=True)
    return trace


def run_well_conditioned(problem: Problem, x0, T: int) -> Trace:
    """1/beta descent on an alpha-strongly-convex, beta-smooth objective.

    For condition number exactly 1 a single step lands on the minimizer, so
    the run stops there and the trace is flagged.
    """
    alpha = problem.strong_convexity_alpha
    beta = problem.smoothness_beta
    if not alpha or not beta:
        raise ValueError("problem must declare both curvature constants")
    kappa = beta / alpha
    if kappa == 1.0:
        T = min(T, 1)
    trace = run_smooth_gd(problem, x0, T)
    trace.meta["method"] = "wellcond-gd"
    trace.constants["alpha"] = alpha
    trace.constants["kappa"] = kappa
    if kappa > 1.0:
        trace.constants["gamma"] = 1.0 / (kappa - 1.0)
    else:
        trace.add_flag("single-step-optimal")
    return trace


def _attach_reference(trace: Trace, problem: Problem, feasible: FeasibleSet,
                      x0, reference: Vector | None,
                      diameter_from_set: bool = False) -> None:
    """Record x*, f*, and a sublevel diameter D on the trace, flagging any
    constant that had to be estimated from the trajectory."""
    if reference is None:
        try:
            reference = problem.minimizer_over(feasible)
        except ValueError:
            # no minimizer over this set: fall back to the simplex comparator
            reference = problem.minimizer_over(Simplex(problem.dim))
            trace.add_flag("comparator-reference")
    reference = as_vector(reference)
    trace.constants["x_star"] = reference
    trace.constants["f_star"] = problem.value(reference)
    if not diameter_from_set:
        D = problem.sublevel_diameter(as_vector(x0))
        if D is None:
            D = max(float(np.linalg.norm(x - reference)) for x in trace.xs())
            trace.add_flag("trajectory-estimated-D")
        trace.constants["D"] = D


def general_norm_smooth_step(kind: Norm, x, g, beta: float) -> Vector:
    """Smooth step under an arbitrary norm:
    argmin_u 0.5 ||u - x||^2 + (1/beta) <g, u - x>.

    The attained objective value is -||g/beta||_*^2 / 2, so the move
    decreases a beta-smooth f by at least ||g||_*^2 / (2 beta).
    """
    if beta <= 0:
        raise ValueError("smoothness constant must be positive")
    x = as_vector(x)
    g = as_vector(g)
    check_same_dim(x, g)
    eta = 1.0 / beta
    if kind is Norm.EUCLIDEAN:
        return x - eta * g
    if kind is Norm.L1:
        # steepest descent direction is a single coordinate: the largest
        # |g_i| (lowest index on ties), moved by eta * ||g||_inf
        mags = np.abs(g)
        i = int(np.argmax(mags))
        d = np.zeros_like(x)
        if mags[i] > 0:
            d[i] = -np.sign(g[i]) * eta * mags[i]
        return x + d
    if kind is Norm.LINF:
        # move every coordinate against its gradient sign by eta * ||g||_1
        scale = eta * float(np.sum(np.abs(g)))
        return x - scale * np.sign(g)
    raise ValueError(f"unsupported norm {kind!r}")

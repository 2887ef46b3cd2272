"""Accelerated gradient methods: the two-sequence coupling, the
weight-recurrence form and their equivalence, constrained and general-norm
variants, the strongly convex variant, and the restart reduction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gdcert.core import (
    FeasibleSet,
    Simplex,
    Unconstrained,
    Vector,
    as_vector,
)
from gdcert.mirror import MirrorMap, EuclideanMap, NegEntropyMap, mirror_step
from gdcert.problems import Problem
from gdcert.smooth import projected_smooth_step, smooth_gd_step
from gdcert.trace import StepRecord, Trace


@dataclass
class AccelState:
    """Coupled iterates: x is played, y is the cautious sequence, z the
    aggressive one."""

    x: Vector
    y: Vector
    z: Vector
    t: int = 0

    @classmethod
    def start(cls, x0) -> "AccelState":
        x0 = as_vector(x0)
        return cls(x=x0.copy(), y=x0.copy(), z=x0.copy(), t=0)


def lambda_schedule(T: int) -> np.ndarray:
    """Momentum weights lambda_0 = 0, lambda_t = (1 + sqrt(1+4 lambda^2))/2.

    Computed in extended precision: the defining identity
    lambda_t^2 - lambda_{t-1}^2 = lambda_t is checked at 1e-12 absolute, which
    exceeds what float64 can represent once lambda grows past ~100.
    """
    if T < 0:
        raise ValueError("horizon must be non-negative")
    one = np.longdouble(1.0)
    lam = np.zeros(T + 1, dtype=np.longdouble)
    for t in range(1, T + 1):
        lam[t] = (one + np.sqrt(one + 4 * lam[t - 1] * lam[t - 1])) / 2
    return lam


class AgmSchedule:
    """Aggressive-step and mixing-weight schedule for the two-sequence method.

    kinds:
      * "agm-smooth":      eta_t = (t+1)/(2 beta), tau_{t+1} = 2/(t+3)
      * "agm-smooth-full": eta_t = (t+1)/beta, same tau (alternative scaling
        used when projections are involved; certified empirically)
      * "agm-lambda":      eta_t = lambda_t/beta, tau_{t+1} = 1/lambda_{t+1}
    """

    KINDS = ("agm-smooth", "agm-smooth-full", "agm-lambda")

    def __init__(self, kind: str = "agm-smooth", T: int | None = None):
        if kind not in self.KINDS:
            raise KeyError(f"unknown acceleration schedule {kind!r}")
        self.kind = kind
        self._lam = None
        if kind == "agm-lambda":
            if T is None:
                raise ValueError("the weight-recurrence schedule needs a horizon")
            self._lam = lambda_schedule(T + 1)

    def eta(self, t: int, beta: float) -> float:
        if self.kind == "agm-smooth":
            return (t + 1.0) / (2.0 * beta)
        if self.kind == "agm-smooth-full":
            return (t + 1.0) / beta
        return float(self._lam[t]) / beta

    def tau_next(self, t: int) -> float:
        """Mixing weight tau_{t+1} applied when forming x_{t+1}."""
        if self.kind in ("agm-smooth", "agm-smooth-full"):
            return 2.0 / (t + 3.0)
        return 1.0 / float(self._lam[t + 1])

    def lam(self, t: int) -> float:
        if self._lam is None:
            raise ValueError("schedule has no momentum weights")
        return float(self._lam[t])


def agm2_step(problem: Problem, state: AccelState, beta: float,
              schedule: AgmSchedule) -> AccelState:
    """One unconstrained coupled step: cautious y-update from x, aggressive
    z-update from z, then mix with tau_{t+1}."""
    g = problem.gradient(state.x)
    t = state.t
    y_next = state.x - g / beta
    z_next = state.z - schedule.eta(t, beta) * g
    tau = schedule.tau_next(t)
    x_next = (1.0 - tau) * y_next + tau * z_next
    return AccelState(x=x_next, y=y_next, z=z_next, t=t + 1)


def constrained_agm_step(feasible: FeasibleSet, problem: Problem,
                         state: AccelState, beta: float,
                         eta_t: float) -> AccelState:
    """Constrained coupled step: both sequence updates are projected; the mix
    stays feasible by convexity."""
    g = problem.gradient(state.x)
    t = state.t
    y_next = feasible.project(state.x - g / beta)
    z_next = feasible.project(state.z - eta_t * g)
    tau = 2.0 / (t + 3.0)
    x_next = (1.0 - tau) * y_next + tau * z_next
    return AccelState(x=x_next, y=y_next, z=z_next, t=t + 1)


def run_agm2(problem: Problem, x0, T: int, schedule: str = "agm-smooth",
             feasible: FeasibleSet | None = None,
             reference: Vector | None = None) -> Trace:
    """Run the two-sequence method, projected when a bounded set is given."""
    if T < 1:
        raise ValueError("need at least one step")
    beta = problem.smoothness_beta
    if beta is None:
        raise ValueError("problem declares no smoothness constant")
    sched = AgmSchedule(schedule, T=T)
    constrained = feasible is not None and not isinstance(feasible, Unconstrained)
    if feasible is None:
        feasible = Unconstrained(problem.dim)
    state = AccelState.start(feasible.project(as_vector(x0)))
    if constrained and sched.kind == "agm-lambda":
        raise ValueError("the weight-recurrence schedule is unconstrained-only")

    steps = []
    for t in range(T):
        eta = sched.eta(t, beta)
        steps.append(StepRecord(
            t=t, x=state.x, f=problem.value(state.x),
            grad=problem.gradient(state.x), eta=eta,
            y=state.y, z=state.z, f_y=problem.value(state.y)))
        if constrained:
            state = constrained_agm_step(feasible, problem, state, beta, eta)
        else:
            state = agm2_step(problem, state, beta, sched)
        if not np.all(np.isfinite(state.x)):
            raise FloatingPointError(f"iterate diverged at step {t}")
    trace = Trace(steps=steps, final_x=state.x, final_y=state.y,
                  final_z=state.z, final_f=problem.value(state.x),
                  final_f_y=problem.value(state.y))
    trace.meta["method"] = "agm2"
    trace.meta["schedule"] = schedule
    trace.meta["constrained"] = constrained
    trace.constants["beta"] = beta
    _attach_accel_reference(trace, problem, feasible, reference)
    return trace


def _attach_accel_reference(trace: Trace, problem: Problem,
                            feasible: FeasibleSet,
                            reference: Vector | None) -> None:
    """Record the reference point the guarantees are measured against; when
    no minimizer exists over the run's set, fall back to the simplex one and
    flag the certificate (the bounds hold for any fixed comparator)."""
    if reference is None:
        try:
            reference = problem.minimizer_over(feasible)
        except ValueError:
            reference = problem.minimizer_over(Simplex(problem.dim))
            trace.add_flag("comparator-reference")
    reference = as_vector(reference)
    trace.constants["x_star"] = reference
    trace.constants["f_star"] = problem.value(reference)


def agm1_step(problem: Problem, x, y_prev, lam_t: float, lam_next: float,
              beta: float) -> tuple[Vector, Vector]:
    """Momentum form of the accelerated step: cautious update plus an
    extrapolation whose coefficient comes from the weight recurrence."""
    if lam_next <= 0:
        raise ValueError("next momentum weight must be positive")
    x = as_vector(x)
    y_prev = as_vector(y_prev)
    y_next = x - problem.gradient(x) / beta
    c = (1.0 - lam_t) / lam_next
    x_next = (1.0 - c) * y_next + c * y_prev
    return x_next, y_next


def agm1_to_agm2_state(x, y, lam: float) -> Vector:
    """Reconstruct the aggressive-sequence point: z = lam x - (lam - 1) y."""
    x = as_vector(x)
    y = as_vector(y)
    return lam * x - (lam - 1.0) * y


def run_agm1(problem: Problem, x0, T: int) -> Trace:
    """Momentum-form accelerated descent; the aggressive-sequence point is
    reconstructed per step so traces align with the coupled form."""
    if T < 1:
        raise ValueError("need at least one step")
    beta = problem.smoothness_beta
    if beta is None:
        raise ValueError("problem declares no smoothness constant")
    lam = lambda_schedule(T + 1)
    x = as_vector(x0).copy()
    y = x.copy()
    steps = []
    for t in range(T):
        lam_t, lam_next = float(lam[t]), float(lam[t + 1])
        z = agm1_to_agm2_state(x, y, lam_t) if t > 0 else x.copy()
        steps.append(StepRecord(t=t, x=x, f=problem.value(x),
                                grad=problem.gradient(x),
                                eta=lam_t / beta, y=y, z=z,
                                f_y=problem.value(y)))
        x, y = agm1_step(problem, x, y, lam_t, lam_next, beta)
    z = agm1_to_agm2_state(x, y, float(lam[T]))
    trace = Trace(steps=steps, final_x=x, final_y=y, final_z=z,
                  final_f=problem.value(x), final_f_y=problem.value(y))
    trace.meta["method"] = "agm1"
    trace.constants["beta"] = beta
    return trace


def _l1_prox_on_simplex(x, g, beta: float, rounds: int = 14,
                        grid: int = 33) -> Vector:
    """argmin over the simplex of <g, y-x> + (beta/2) ||y - x||_1^2 by grid
    refinement (reference-quality; dimensions up to 3)."""
    x = as_vector(x)
    g = as_vector(g)
    n = x.shape[0]
    if n == 1:
        return np.ones(1)
    if n > 3:
        raise ValueError("grid prox supports dimension <= 3 only")

    def objective(free):
        last = 1.0 - free.sum(axis=0)
        pts = np.concatenate([free, last[None]], axis=0)
        diff = np.abs(pts - x.reshape(-1, *([1] * free[0].ndim)))
        l1 = diff.sum(axis=0)
        lin = np.tensordot(g, pts - x.reshape(-1, *([1] * free[0].ndim)), axes=(0, 0))
        bad = last < -1e-15
        return np.where(bad, np.inf, lin + 0.5 * beta * l1 * l1), pts

    lo = np.zeros(n - 1)
    hi = np.ones(n - 1)
    best = None
    for _ in range(rounds):
        axes = [np.linspace(lo[i], hi[i], grid) for i in range(n - 1)]
        mesh = np.meshgrid(*axes, indexing="ij")
        free = np.stack(mesh, axis=0)
        vals, pts = objective(free)
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        center = np.array([axes[i][idx[i]] for i in range(n - 1)])
        best = pts[(slice(None),) + idx]
        width = (hi - lo) / (grid - 1)
        lo = np.maximum(center - 2 * width, 0.0)
        hi = np.minimum(center + 2 * width, 1.0)
    best = np.maximum(best, 0.0)
    return best / float(np.sum(best))


def general_norm_agm_step(mirror_map: MirrorMap, feasible: FeasibleSet,
                          problem: Problem, state: AccelState,
                          beta: float) -> AccelState:
    """Coupled step under a mirror map: the cautious update is the smooth
    step in the map's norm (solved on the set), the aggressive update is a
    mirror step, and the mix uses tau_{t+1} = 2/(t+3)."""
    g = problem.gradient(state.x)
    t = state.t
    eta = (t + 1.0) * mirror_map.alpha_h / (2.0 * beta)
    if isinstance(mirror_map, EuclideanMap):
        y_next = projected_smooth_step(feasible, state.x, g, beta)
    elif isinstance(mirror_map, NegEntropyMap) and isinstance(feasible, Simplex):
        y_next = _l1_prox_on_simplex(state.x, g, beta)
    else:
        raise ValueError(
            f"unsupported (map, set) pair: ({mirror_map.map_id}, {type(feasible).__name__})")
    z_next = mirror_step(mirror_map, feasible, state.z, g, eta)
    tau = 2.0 / (t + 3.0)
    x_next = (1.0 - tau) * y_next + tau * z_next
    return AccelState(x=x_next, y=y_next, z=z_next, t=t + 1)


def run_general_norm_agm(problem: Problem, mirror_map: MirrorMap,
                         feasible: FeasibleSet, x0, T: int) -> Trace:
    if T < 1:
        raise ValueError("need at least one step")
    beta = problem.smoothness_beta
    if beta is None:
        raise ValueError("problem declares no smoothness constant")
    state = AccelState.start(as_vector(x0))
    if not (feasible.member(state.x) and mirror_map.interior(state.x)):
        raise ValueError("starting point must be an interior member")
    steps = []
    for t in range(T):
        eta = (t + 1.0) * mirror_map.alpha_h / (2.0 * beta)
        steps.append(StepRecord(
            t=t, x=state.x, f=problem.value(state.x),
            grad=problem.gradient(state.x), eta=eta,
            y=state.y, z=state.z, f_y=problem.value(state.y)))
        state = general_norm_agm_step(mirror_map, feasible, problem, state, beta)
    trace = Trace(steps=steps, final_x=state.x, final_y=state.y,
                  final_z=state.z, final_f=problem.value(state.x),
                  final_f_y=problem.value(state.y))
    trace.meta["method"] = f"agm2-{mirror_map.map_id}"
    trace.meta["map"] = mirror_map.map_id
    trace.constants["beta"] = beta
    trace.constants["alpha_h"] = mirror_map.alpha_h
    x_star = problem.minimizer_over(feasible)
    trace.constants["x_star"] = x_star
    trace.constants["f_star"] = problem.value(x_star)
    trace.constants["bregman_x_star_z0"] = mirror_map.bregman(x_star, as_vector(x0))
    return trace


def sc_agm_step(problem: Problem, x, y_prev, kappa: float,
                beta: float) -> tuple[Vector, Vector]:
    """Accelerated step for well-conditioned objectives: cautious update plus
    fixed momentum (sqrt(kappa)-1)/(sqrt(kappa)+1)."""
    if kappa < 1:
        raise ValueError("condition number must be at least 1")
    if kappa == 1:
        raise ValueError("condition number 1 is solved by a single smooth step")
    x = as_vector(x)
    y_prev = as_vector(y_prev)
    m = (np.sqrt(kappa) - 1.0) / (np.sqrt(kappa) + 1.0)
    y_next = x - problem.gradient(x) / beta
    x_next = (1.0 + m) * y_next - m * y_prev
    return x_next, y_next


def sc_agm_z(x, y, kappa: float) -> Vector:
    """Implied aggressive-sequence point z = sqrt(kappa) (x - y) + x."""
    if kappa <= 1:
        raise ValueError("condition number must exceed 1")
    x = as_vector(x)
    y = as_vector(y)
    return np.sqrt(kappa) * (x - y) + x


def sc_agm_recursion_residual(problem: Problem, x, z, z_next,
                              alpha: float, kappa: float) -> float:
    """Deviation from the implied z-recursion
    z+ = (1 - 1/sqrt(kappa)) z + x/sqrt(kappa) - grad/(alpha sqrt(kappa))."""
    rk = np.sqrt(kappa)
    predicted = (1.0 - 1.0 / rk) * as_vector(z) + as_vector(x) / rk \
        - problem.gradient(x) / (alpha * rk)
    return float(np.max(np.abs(as_vector(z_next) - predicted)))


def run_sc_agm(problem: Problem, x0, T: int) -> Trace:
    """Accelerated descent for strongly convex smooth objectives.

    Condition number exactly 1 bypasses acceleration: one exact smooth step
    reaches the minimizer.
    """
    alpha = problem.strong_convexity_alpha
    beta = problem.smoothness_beta
    if not alpha or not beta:
        raise ValueError("problem must declare both curvature constants")
    kappa = beta / alpha
    x_star = problem.minimizer_over(Unconstrained(problem.dim))
    f_star = problem.value(x_star)

    if kappa == 1.0:
        x0 = as_vector(x0)
        g = problem.gradient(x0)
        y1 = smooth_gd_step(x0, g, beta)
        steps = [StepRecord(t=0, x=x0, f=problem.value(x0), grad=g,
                            eta=1.0 / beta, y=x0.copy(), z=x0.copy(),
                            f_y=problem.value(x0))]
        trace = Trace(steps=steps, final_x=y1, final_y=y1, final_z=y1,
                      final_f=problem.value(y1), final_f_y=problem.value(y1))
        trace.meta["method"] = "sc-agm"
        trace.constants.update({"alpha": alpha, "beta": beta, "kappa": kappa,
                                "x_star": x_star, "f_star": f_star})
        trace.add_flag("single-step-optimal")
        return trace

    x = as_vector(x0).copy()
    y = x.copy()
    steps = []
    for t in range(T):
        z = sc_agm_z(x, y, kappa) if t > 0 else x.copy()
        steps.append(StepRecord(t=t, x=x, f=problem.value(x),
                                grad=problem.gradient(x), eta=1.0 / beta,
                                y=y, z=z, f_y=problem.value(y)))
        x, y = sc_agm_step(problem, x, y, kappa, beta)
    z = sc_agm_z(x, y, kappa)
    trace = Trace(steps=steps, final_x=x, final_y=y, final_z=z,
                  final_f=problem.value(x), final_f_y=problem.value(y))
    trace.meta["method"] = "sc-agm"
    gamma = 1.0 / (np.sqrt(kappa) - 1.0)
    trace.constants.update({"alpha": alpha, "beta": beta, "kappa": kappa,
                            "gamma": gamma, "x_star": x_star, "f_star": f_star})
    return trace


def restart_accelerated(problem: Problem, x0, epsilon: float,
                        max_epochs: int = 400) -> Trace:
    """Repeatedly run the smooth two-sequence method for ceil(4 sqrt(kappa))
    steps and restart from its cautious point; the distance to the minimizer
    halves per epoch, giving linear convergence from a sublinear method."""
    alpha = problem.strong_convexity_alpha
    beta = problem.smoothness_beta
    if not alpha or not beta:
        raise ValueError("problem must declare both curvature constants")
    kappa = beta / alpha
    x_star = problem.minimizer_over(Unconstrained(problem.dim))
    f_star = problem.value(x_star)
    epoch_len = int(np.ceil(4.0 * np.sqrt(kappa)))

    x = as_vector(x0).copy()
    steps: list[StepRecord] = []
    epochs = []
    sched = AgmSchedule("agm-smooth")
    t_global = 0
    for _ in range(max_epochs):
        if problem.value(x) - f_star <= epsilon:
            break
        start_dist = float(np.linalg.norm(x - x_star))
        state = AccelState.start(x)
        for _ in range(epoch_len):
            steps.append(StepRecord(
                t=t_global, x=state.x, f=problem.value(state.x),
                grad=problem.gradient(state.x),
                eta=sched.eta(state.t, beta),
                y=state.y, z=state.z, f_y=problem.value(state.y)))
            state = agm2_step(problem, state, beta, sched)
            t_global += 1
        x = state.y.copy()
        epochs.append({"steps": epoch_len,
                       "start_distance": start_dist,
                       "end_distance": float(np.linalg.norm(x - x_star))})
    trace = Trace(steps=steps, final_x=x, final_f=problem.value(x))
    trace.meta["method"] = "restart-agm"
    trace.meta["epochs"] = epochs
    trace.meta["epoch_length"] = epoch_len
    trace.constants.update({"alpha": alpha, "beta": beta, "kappa": kappa,
                            "x_star": x_star, "f_star": f_star,
                            "epsilon": epsilon})
    return trace

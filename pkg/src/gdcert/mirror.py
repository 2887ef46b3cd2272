"""Mirror maps, Bregman divergences and projections, the mirror-descent
update, and the multiplicative-weights closed form."""

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
from gdcert.problems import OnlineAdversary
from gdcert.trace import StepRecord, Trace


class MirrorMap:
    """Strongly convex generator h carrying points to the dual space via its
    gradient and back via the inverse gradient."""

    norm: Norm
    alpha_h: float
    map_id: str

    def h(self, x) -> float:
        raise NotImplementedError

    def grad_h(self, x) -> Vector:
        raise NotImplementedError

    def grad_h_star(self, theta) -> Vector:
        raise NotImplementedError

    def interior(self, x) -> bool:
        """Whether grad_h is defined at x."""
        return True

    def bregman(self, y, x) -> float:
        """h(y) - h(x) - <grad h(x), y - x>: the linearization error at y."""
        y = as_vector(y)
        x = as_vector(x)
        check_same_dim(y, x)
        if not self.interior(x):
            raise ValueError("second argument must lie in the map's interior")
        return self.h(y) - self.h(x) - float(np.dot(self.grad_h(x), y - x))


class EuclideanMap(MirrorMap):
    """h = 0.5 ||x||_2^2: the identity mirror map; divergence is half the
    squared Euclidean distance."""

    norm = Norm.EUCLIDEAN
    alpha_h = 1.0
    map_id = "euclidean"

    def h(self, x) -> float:
        v = as_vector(x)
        return 0.5 * float(np.dot(v, v))

    def grad_h(self, x) -> Vector:
        return as_vector(x).copy()

    def grad_h_star(self, theta) -> Vector:
        return as_vector(theta).copy()

    def bregman(self, y, x) -> float:
        d = as_vector(y) - as_vector(x)
        return 0.5 * float(np.dot(d, d))


class NegEntropyMap(MirrorMap):
    """h = sum_i x_i ln x_i on the positive orthant, measured against the
    l1 norm; the divergence restricted to the simplex is the KL divergence."""

    norm = Norm.L1
    alpha_h = 1.0
    map_id = "negentropy"

    def h(self, x) -> float:
        v = as_vector(x)
        if np.any(v < 0):
            raise ValueError("negative entry outside the entropy domain")
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(v > 0, v * np.log(v), 0.0)  # 0 ln 0 = 0
        return float(np.sum(terms))

    def grad_h(self, x) -> Vector:
        v = as_vector(x)
        if np.any(v <= 0):
            raise ValueError("gradient of entropy needs strictly positive entries")
        return 1.0 + np.log(v)

    def grad_h_star(self, theta) -> Vector:
        return np.exp(as_vector(theta) - 1.0)

    def interior(self, x) -> bool:
        return bool(np.all(as_vector(x) > 0))

    def bregman(self, y, x) -> float:
        # sum_i y_i ln(y_i / x_i) + sum(x) - sum(y); reduces to KL on the
        # simplex, and stays finite when y has zero entries
        y = as_vector(y)
        x = as_vector(x)
        check_same_dim(y, x)
        if not self.interior(x):
            raise ValueError("second argument must lie in the entropy interior")
        if np.any(y < 0):
            raise ValueError("first argument outside the entropy domain")
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(y > 0, y * np.log(y / x), 0.0)
        return float(np.sum(terms) + np.sum(x) - np.sum(y))


MAPS = {
    "euclidean": EuclideanMap,
    "negentropy": NegEntropyMap,
}


def get_map(map_id: str) -> MirrorMap:
    if map_id not in MAPS:
        raise KeyError(f"unknown mirror map {map_id!r}")
    return MAPS[map_id]()


def bregman(mirror_map: MirrorMap, y, x) -> float:
    return mirror_map.bregman(y, x)


def bregman_project(mirror_map: MirrorMap, feasible: FeasibleSet, x_prime) -> Vector:
    """argmin over the set of the divergence from x_prime.

    Supported pairs: the Euclidean map with any set (reduces to Euclidean
    projection) and negative entropy with the simplex (an l1 rescale).
    """
    x_prime = as_vector(x_prime)
    if isinstance(mirror_map, EuclideanMap):
        return feasible.project(x_prime)
    if isinstance(mirror_map, NegEntropyMap):
        if isinstance(feasible, Simplex):
            if not mirror_map.interior(x_prime):
                raise ValueError("entropy projection needs a positive point")
            return x_prime / float(np.sum(x_prime))
        if isinstance(feasible, Unconstrained):
            return x_prime.copy()
    raise ValueError(
        f"unsupported (map, set) pair: ({mirror_map.map_id}, {type(feasible).__name__})")


def mirror_step(mirror_map: MirrorMap, feasible: FeasibleSet, x, g,
                eta: float) -> Vector:
    """Dual-space gradient step pulled back and Bregman-projected:
    project(grad_h_star(grad_h(x) - eta * g))."""
    if eta <= 0:
        raise ValueError("step size must be positive")
    x = as_vector(x)
    g = as_vector(g)
    check_same_dim(x, g)
    if not mirror_map.interior(x):
        raise ValueError("iterate left the mirror map's interior")
    if isinstance(mirror_map, NegEntropyMap) and isinstance(feasible, Simplex):
        # multiplicative update in log space; subtracting the max exponent
        # is absorbed by the rescaling projection and avoids overflow
        logits = np.log(x) - eta * g
        w = np.exp(logits - np.max(logits))
        return w / float(np.sum(w))
    theta = mirror_map.grad_h(x) - eta * g
    return bregman_project(mirror_map, feasible, mirror_map.grad_h_star(theta))


def run_mirror_descent(adversary: OnlineAdversary, mirror_map: MirrorMap,
                       feasible: FeasibleSet, x0, eta: float, T: int,
                       comparator: Vector | None = None) -> Trace:
    """T rounds of mirror descent; gradients are recorded so the certifier
    can evaluate their dual norms against the regret guarantee."""
    if T < 1:
        raise ValueError("need at least one round")
    x = as_vector(x0)
    if not (feasible.member(x) and mirror_map.interior(x)):
        raise ValueError("starting point must be an interior member")
    if comparator is None:
        comparator = adversary.comparator_over(feasible, T)
    comparator = as_vector(comparator)

    steps = []
    for t in range(T):
        loss = adversary.next_loss(t, x)
        g = loss.gradient(x)
        steps.append(StepRecord(t=t, x=x, f=loss.value(x), grad=g, eta=eta,
                                f_ref=loss.value(comparator)))
        x = mirror_step(mirror_map, feasible, x, g, eta)
    trace = Trace(steps=steps, final_x=x)
    trace.meta["method"] = f"mirror-{mirror_map.map_id}"
    trace.constants["eta"] = eta
    trace.constants["alpha_h"] = mirror_map.alpha_h
    trace.constants["x_star"] = comparator
    trace.constants["bregman_x_star_x0"] = mirror_map.bregman(comparator, as_vector(x0))
    trace.meta["map"] = mirror_map.map_id
    return trace


def hedge_closed_form(x0, cumulative_grads, eta: float) -> Vector:
    """Multiplicative-weights point after absorbing the summed gradients:
    x_i proportional to x0_i * exp(-eta * sum of gradients), normalized.

    Matches iterating ``mirror_step`` with the entropy map on the simplex.
    """
    x0 = as_vector(x0)
    if np.any(x0 <= 0):
        raise ValueError("starting point must be simplex-interior")
    cumulative_grads = as_vector(cumulative_grads)
    check_same_dim(x0, cumulative_grads)
    logits = np.log(x0) - eta * cumulative_grads
    w = np.exp(logits - np.max(logits))
    return w / float(np.sum(w))


def generalized_pythagorean_gap(mirror_map: MirrorMap, feasible: FeasibleSet,
                                a, b_prime) -> tuple[float, float]:
    """Both slack quantities of the Bregman projection inequality.

    With b the Bregman projection of b_prime, returns
      (<grad h(b') - grad h(b), a - b>,
       D(a||b') - D(a||b) - D(b||b')).
    The first is non-positive and the second non-negative for any member a.
    """
    a = as_vector(a)
    b_prime = as_vector(b_prime)
    if not feasible.member(a):
        raise ValueError("first argument must belong to the feasible set")
    if not mirror_map.interior(b_prime):
        raise ValueError("second argument must lie in the map's interior")
    b = bregman_project(mirror_map, feasible, b_prime)
    first = float(np.dot(mirror_map.grad_h(b_prime) - mirror_map.grad_h(b), a - b))
    second = (mirror_map.bregman(a, b_prime) - mirror_map.bregman(a, b)
              - mirror_map.bregman(b, b_prime))
    return first, second


def tuned_eta(mirror_map: MirrorMap, x_star, x0, G_dual: float, T: int) -> float:
    """Step size balancing the two terms of the mirror-descent regret bound:
    sqrt(2 alpha_h D(x*||x0) / (T G^2))."""
    div = mirror_map.bregman(x_star, x0)
    if div <= 0:
        return 1.0 / (G_dual * np.sqrt(T))
    return float(np.sqrt(2.0 * mirror_map.alpha_h * div / (T * G_dual ** 2)))

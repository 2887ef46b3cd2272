"""Shared run-record format consumed by the certifier and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gdcert.core import Vector


@dataclass
class StepRecord:
    """One iteration of any method.

    ``f`` is the round loss at the played point (for fixed objectives, the
    objective value), ``f_ref`` the same round loss at the comparator, and
    ``grad`` the gradient the step consumed. Accelerated methods also carry
    the auxiliary ``y``/``z`` points and the value at ``y``, which is the
    point their guarantees speak about.
    """

    t: int
    x: Vector
    f: float
    grad: Vector
    eta: float | None = None
    f_ref: float | None = None
    y: Vector | None = None
    z: Vector | None = None
    f_y: float | None = None
    phi: float | None = None
    step_ok: bool | None = None


@dataclass
class Trace:
    """Iterate history of one run plus the constants the run used.

    ``steps`` holds one record per gradient evaluation (t = 0 .. T-1);
    ``final_x`` (and ``final_y``/``final_z`` for coupled methods) is the state
    after the last update. ``meta`` echoes the configuration and carries the
    constants and flags the certifier needs, e.g. ``meta["constants"]["D"]``
    and ``meta["flags"] = ["trajectory-estimated-D"]``.
    """

    steps: list[StepRecord]
    final_x: Vector
    meta: dict = field(default_factory=dict)
    final_y: Vector | None = None
    final_z: Vector | None = None
    final_f: float | None = None
    final_f_y: float | None = None

    @property
    def T(self) -> int:
        return len(self.steps)

    def xs(self) -> list[Vector]:
        """All iterates x_0 .. x_T including the final point."""
        return [s.x for s in self.steps] + [self.final_x]

    def ys(self) -> list[Vector]:
        out = [s.y for s in self.steps]
        out.append(self.final_y)
        return out

    def zs(self) -> list[Vector]:
        out = [s.z for s in self.steps]
        out.append(self.final_z)
        return out

    def f_values(self) -> np.ndarray:
        vals = [s.f for s in self.steps]
        if self.final_f is not None:
            vals.append(self.final_f)
        return np.asarray(vals)

    def regret(self) -> float:
        """Total loss relative to the comparator over the played rounds."""
        if any(s.f_ref is None for s in self.steps):
            raise ValueError("trace has no comparator values")
        return float(sum(s.f - s.f_ref for s in self.steps))

    def average_regret(self) -> float:
        return self.regret() / self.T

    @property
    def constants(self) -> dict:
        return self.meta.setdefault("constants", {})

    @property
    def flags(self) -> list:
        return self.meta.setdefault("flags", [])

    def add_flag(self, flag: str) -> None:
        if flag not in self.flags:
            self.flags.append(flag)

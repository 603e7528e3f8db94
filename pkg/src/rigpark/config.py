"""Planner and tracking-controller configuration records.

Kept in their own module so scenario I/O can construct them without importing
the planner/controller machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SearchConfig:
    """Hybrid A* search parameters.

    xy_res: closed-set grid cell size [m]
    psi_bins / psi_t_bins: heading discretization counts (tractor / trailer)
    primitive_len: arc length of one expansion [m]
    steer_set: steering angles tried per expansion [rad], symmetric about 0
    reverse_penalty: arc-length multiplier for reverse motion (>= 1)
    switch_penalty: flat cost per direction change
    steer_change_penalty: cost per radian of steering change between primitives
    hitch_penalty: cost per radian of mean |hitch angle| over a primitive
    node_budget: maximum node expansions before giving up
    """

    xy_res: float = 0.5
    psi_bins: int = 72
    psi_t_bins: int = 72
    primitive_len: float = 2.0
    steer_set: tuple[float, ...] = (-0.55, -0.275, 0.0, 0.275, 0.55)
    reverse_penalty: float = 2.0
    switch_penalty: float = 5.0
    steer_change_penalty: float = 1.0
    hitch_penalty: float = 2.0
    node_budget: int = 500_000

    def validate(self, max_steer: float | None = None) -> None:
        if not self.xy_res > 0.0:
            raise ValueError("planner.xy_res must be positive")
        if self.psi_bins < 8 or self.psi_t_bins < 8:
            raise ValueError("planner heading bins must be >= 8")
        if self.primitive_len < self.xy_res:
            raise ValueError("planner.primitive_len must be >= xy_res")
        if self.node_budget <= 0:
            raise ValueError("planner.node_budget must be positive")
        if self.reverse_penalty < 1.0:
            raise ValueError("planner.reverse_penalty must be >= 1")
        if self.switch_penalty < 0.0 or self.steer_change_penalty < 0.0 or self.hitch_penalty < 0.0:
            raise ValueError("planner penalties must be >= 0")
        if not self.steer_set:
            raise ValueError("planner.steer_set must be nonempty")
        values = sorted(self.steer_set)
        for a in values:
            if not any(math.isclose(a, -b, abs_tol=1e-12) for b in values):
                raise ValueError("planner.steer_set must be symmetric about 0")
        if max_steer is not None and any(abs(a) > max_steer + 1e-12 for a in values):
            raise ValueError("planner.steer_set exceeds vehicle max_steer")


@dataclass(frozen=True)
class TrackConfig:
    """Closed-loop tracking parameters for the LQR and NMPC controllers.

    q_diag weighs (x, y, psi, psi_t) error; r_diag weighs (v, delta) effort.
    nmpc_lambda is the uniform control-effort weight of the NMPC cost, and
    nmpc_step the projected-gradient step size.
    """

    controller: str = "lqr"
    dt: float = 0.1
    q_diag: tuple[float, float, float, float] = (1.0, 1.0, 0.5, 0.5)
    r_diag: tuple[float, float] = (0.1, 0.1)
    nmpc_horizon: int = 20
    nmpc_lambda: float = 0.1
    nmpc_iters: int = 50
    nmpc_step: float = 0.05
    dare_tol: float = 1e-9
    dare_max_iters: int = 10_000

    def validate(self) -> None:
        if self.controller not in ("lqr", "nmpc"):
            raise ValueError("controller.controller must be 'lqr' or 'nmpc'")
        if not self.dt > 0.0:
            raise ValueError("controller.dt must be positive")
        if len(self.q_diag) != 4 or any(q < 0.0 for q in self.q_diag):
            raise ValueError("controller.q_diag needs 4 nonnegative weights")
        if len(self.r_diag) != 2 or any(r <= 0.0 for r in self.r_diag):
            raise ValueError("controller.r_diag needs 2 positive weights")
        if self.nmpc_horizon < 1:
            raise ValueError("controller.nmpc_horizon must be >= 1")
        if self.nmpc_lambda < 0.0:
            raise ValueError("controller.nmpc_lambda must be >= 0")
        if self.nmpc_iters < 1:
            raise ValueError("controller.nmpc_iters must be >= 1")
        if not self.nmpc_step > 0.0:
            raise ValueError("controller.nmpc_step must be positive")
        if not self.dare_tol > 0.0:
            raise ValueError("controller.dare_tol must be positive")
        if self.dare_max_iters < 1:
            raise ValueError("controller.dare_max_iters must be >= 1")

"""Trajectory tracking: discrete LQR, finite-horizon NMPC, and the hitch guard.

Both controllers operate on a ReferenceTrajectory resampled from a planned
path at the control period. The hitch guard runs after whichever controller
is active and is the hard safety constraint: it never lets a commanded
control push the hitch angle past its limit without cutting speed to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import TrackConfig
from .geometry import normalize_angle
from .vehicle import ArticulatedState, ControlInput, VehicleParams, step, step_batch


class NoConvergenceError(RuntimeError):
    """DARE fixed-point iteration exhausted its budget."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"riccati iteration did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations


class SingularRError(ValueError):
    """Control weight matrix R is not positive definite."""


def solve_dare(
    A: np.ndarray,
    B: np.ndarray,
    Q: np.ndarray,
    R: np.ndarray,
    tol: float = 1e-9,
    max_iters: int = 10_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve the discrete algebraic Riccati equation by fixed-point iteration.

    Iterates P <- Q + A'PA - A'PB (R + B'PB)^-1 B'PA from P = Q until the
    fixed-point residual infinity-norm drops below tol. Returns (P, K) with
    K = (R + B'PB)^-1 B'PA.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    if B.ndim != 2 or B.shape[0] != A.shape[0]:
        raise ValueError("B must be n x m")
    try:
        np.linalg.cholesky(R)
    except np.linalg.LinAlgError as exc:
        raise SingularRError("R must be positive definite") from exc

    def advance(P: np.ndarray) -> np.ndarray:
        BtP = B.T @ P
        gain = np.linalg.solve(R + BtP @ B, BtP @ A)
        return Q + A.T @ P @ A - A.T @ P @ B @ gain

    P = Q.copy()
    residual = math.inf
    for _ in range(max_iters):
        P_next = advance(P)
        prev_residual = residual
        residual = float(np.max(np.abs(P_next - P)))
        # Stop well inside tol so the fixed-point error (residual divided by
        # one minus the contraction rate) also lands under tol; accept a
        # stagnated residual that is still under tol.
        if residual < 0.25 * tol or (residual < tol and residual >= prev_residual):
            BtP = B.T @ P
            K = np.linalg.solve(R + BtP @ B, BtP @ A)
            return P, K
        P = P_next
    raise NoConvergenceError(residual, max_iters)


def linearize(
    s_ref: ArticulatedState,
    u_ref: ControlInput,
    dt: float,
    params: VehicleParams,
    eps: float = 1e-5,
) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference Jacobians (A, B) of the step map about a reference."""
    base = np.array(s_ref.as_tuple())
    states = np.tile(base, (16, 1))
    v = np.full(16, u_ref.v)
    d = np.full(16, u_ref.delta)
    for i in range(4):
        states[2 * i, i] += eps
        states[2 * i + 1, i] -= eps
    v[8] += eps
    v[9] -= eps
    d[10] += eps
    d[11] -= eps
    out = step_batch(states, v, d, dt, params)
    A = np.empty((4, 4))
    for i in range(4):
        diff = out[2 * i] - out[2 * i + 1]
        diff[2:] = [normalize_angle(a) for a in diff[2:]]
        A[:, i] = diff / (2 * eps)
    B = np.empty((4, 2))
    for j, row in enumerate((8, 10)):
        diff = out[row] - out[row + 1]
        diff[2:] = [normalize_angle(a) for a in diff[2:]]
        B[:, j] = diff / (2 * eps)
    return A, B


@dataclass
class ReferenceTrajectory:
    """Time-uniform (state, control) samples consistent with the vehicle model.

    states has one more entry than controls; states[k+1] is exactly
    step(states[k], controls[k], dt).
    """

    states: list[ArticulatedState]
    controls: list[ControlInput]
    dt: float

    def __len__(self) -> int:
        return len(self.controls)

    @classmethod
    def from_path(cls, path, dt: float, params: VehicleParams) -> "ReferenceTrajectory":
        """Resample a planned path's piecewise-constant controls at period dt.

        The reference is rebuilt by integrating the vehicle model, so it is
        replay-consistent by construction. With the default planner sub-step
        (0.2 s) and dt = 0.1 s the control switch points align exactly.
        """
        if not path.controls:
            return cls([path.states[0]], [], dt)
        total = len(path.controls) * path.dt
        steps = max(1, int(math.ceil(total / dt - 1e-9)))
        states = [path.states[0]]
        controls = []
        s = path.states[0]
        for k in range(steps):
            idx = min(int((k * dt) / path.dt + 1e-9), len(path.controls) - 1)
            u = path.controls[idx]
            s = step(s, u, dt, params)
            controls.append(u)
            states.append(s)
        return cls(states, controls, dt)


def track_lqr(
    s: ArticulatedState,
    ref: ReferenceTrajectory,
    k: int,
    cfg: TrackConfig,
    params: VehicleParams,
) -> ControlInput:
    """LQR feedback about the k-th reference sample, clamped to vehicle limits."""
    if not 0 <= k < len(ref.controls):
        raise IndexError(f"reference index {k} out of range")
    s_ref = ref.states[k]
    u_ref = ref.controls[k]
    A, B = linearize(s_ref, u_ref, cfg.dt, params)
    _, K = solve_dare(
        A, B, np.diag(cfg.q_diag), np.diag(cfg.r_diag),
        tol=cfg.dare_tol, max_iters=cfg.dare_max_iters,
    )
    error = np.array(
        [
            s.x - s_ref.x,
            s.y - s_ref.y,
            normalize_angle(s.psi - s_ref.psi),
            normalize_angle(s.psi_t - s_ref.psi_t),
        ]
    )
    u = np.array([u_ref.v, u_ref.delta]) - K @ error
    return ControlInput(
        float(min(max(u[0], params.v_min), params.v_max)),
        float(min(max(u[1], -params.max_steer), params.max_steer)),
    )


# ---------------------------------------------------------------------------
# NMPC
# ---------------------------------------------------------------------------

def minimize_control_sequence(
    cost_fn,
    u0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    iters: int,
    step_size: float,
    grad_eps: float = 1e-4,
):
    """Projected gradient descent with backtracking on a flat control vector.

    cost_fn maps a (B, n) batch of control vectors to (B,) costs. Gradients
    come from central finite differences over the sequence. The step is
    halved whenever a candidate would increase the cost; accepted costs are
    therefore nonincreasing. Returns (best_u, accepted_costs, last_gradient).
    """
    u = np.clip(np.asarray(u0, dtype=float), lower, upper)
    n = u.size
    cost = float(cost_fn(u[None, :])[0])
    best_u, best_cost = u.copy(), cost
    accepted = [cost]
    alpha = step_size
    grad = np.zeros(n)
    for _ in range(iters):
        batch = np.tile(u, (2 * n, 1))
        idx = np.arange(n)
        batch[2 * idx, idx] += grad_eps
        batch[2 * idx + 1, idx] -= grad_eps
        costs = cost_fn(batch)
        grad = (costs[0::2] - costs[1::2]) / (2.0 * grad_eps)
        gnorm = float(np.max(np.abs(grad)))
        if gnorm < 1e-14:
            break
        stepped = False
        while alpha * gnorm > 1e-12:
            candidate = np.clip(u - alpha * grad, lower, upper)
            c_cost = float(cost_fn(candidate[None, :])[0])
            if c_cost <= cost:
                u, cost = candidate, c_cost
                accepted.append(cost)
                if cost < best_cost:
                    best_u, best_cost = u.copy(), cost
                stepped = True
                break
            alpha *= 0.5
        if not stepped:
            break
    return best_u, accepted, grad


def nmpc_cost_fn(
    s: ArticulatedState,
    ref_states: np.ndarray,
    horizon: int,
    cfg: TrackConfig,
    params: VehicleParams,
):
    """Batched tracking cost over a horizon for flat (v0, d0, v1, d1, ...) vectors.

    Cost is the q_diag-weighted squared state error summed over the horizon
    samples (the fixed current sample included) plus nmpc_lambda times the
    squared control magnitudes.
    """
    q = np.asarray(cfg.q_diag, dtype=float)
    lam = cfg.nmpc_lambda
    s0 = np.array(s.as_tuple())
    e0 = s0 - ref_states[0]
    e0[2:] = e0[2:] - 2.0 * math.pi * np.round(e0[2:] / (2.0 * math.pi))
    base_cost = float(q @ (e0 * e0))

    def cost(batch: np.ndarray) -> np.ndarray:
        m = batch.shape[0]
        seq = batch.reshape(m, horizon, 2)
        states = np.tile(s0, (m, 1))
        total = np.full(m, base_cost)
        for j in range(horizon):
            states = step_batch(states, seq[:, j, 0], seq[:, j, 1], cfg.dt, params)
            err = states - ref_states[j + 1]
            werr = err[:, 2:] - 2.0 * math.pi * np.round(err[:, 2:] / (2.0 * math.pi))
            total += (
                q[0] * err[:, 0] ** 2
                + q[1] * err[:, 1] ** 2
                + q[2] * werr[:, 0] ** 2
                + q[3] * werr[:, 1] ** 2
            )
            total += lam * (seq[:, j, 0] ** 2 + seq[:, j, 1] ** 2)
        return total

    return cost


def nmpc_refine(
    s: ArticulatedState,
    ref: ReferenceTrajectory,
    k: int,
    cfg: TrackConfig,
    params: VehicleParams,
) -> list[ControlInput]:
    """Refine the next nmpc_horizon reference controls by projected gradient.

    The horizon truncates at the end of the reference. The reference controls
    seed the optimizer, so on-reference calls with zero effort weight return
    them unchanged. Always returns the lowest-cost sequence encountered.
    """
    if not 0 <= k < len(ref.controls):
        raise IndexError(f"reference index {k} out of range")
    horizon = min(cfg.nmpc_horizon, len(ref.controls) - k)
    ref_states = np.array([st.as_tuple() for st in ref.states[k : k + horizon + 1]])
    u0 = np.array(
        [(ref.controls[k + j].v, ref.controls[k + j].delta) for j in range(horizon)]
    ).ravel()
    lower = np.tile([params.v_min, -params.max_steer], horizon)
    upper = np.tile([params.v_max, params.max_steer], horizon)
    cost = nmpc_cost_fn(s, ref_states, horizon, cfg, params)
    best, _, _ = minimize_control_sequence(
        cost, u0, lower, upper, cfg.nmpc_iters, cfg.nmpc_step
    )
    seq = best.reshape(horizon, 2)
    return [ControlInput(float(v), float(d)) for v, d in seq]


def hitch_guard(
    u: ControlInput,
    s: ArticulatedState,
    cfg: TrackConfig,
    params: VehicleParams,
) -> ControlInput:
    """Hard hitch-angle constraint applied after the tracking controller.

    If one control period of u keeps |gamma| within the limit, u passes
    through unchanged. Otherwise 21 evenly spaced steering angles are tried
    at the commanded speed and the admissible one minimizing the next-step
    |gamma| wins; if none is admissible the rig is stopped (v = 0, delta = 0).
    """
    nxt = step(s, u, cfg.dt, params)
    if abs(normalize_angle(nxt.psi - nxt.psi_t)) <= params.max_hitch:
        return u
    deltas = np.linspace(-params.max_steer, params.max_steer, 21)
    states = np.tile(np.array(s.as_tuple()), (21, 1))
    out = step_batch(states, np.full(21, u.v), deltas, cfg.dt, params)
    gammas = np.abs(
        np.arctan2(np.sin(out[:, 2] - out[:, 3]), np.cos(out[:, 2] - out[:, 3]))
    )
    admissible = gammas <= params.max_hitch
    if not admissible.any():
        return ControlInput(0.0, 0.0)
    gammas = np.where(admissible, gammas, np.inf)
    best = int(np.argmin(gammas))
    return ControlInput(u.v, float(deltas[best]))

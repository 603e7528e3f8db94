"""Hybrid A* search over the articulated configuration space.

Search states carry the tractor pose and the trailer heading; the closed-set
key therefore includes a trailer-heading bin, because two nodes with equal
tractor pose but different hitch angles have different futures. Edges are
short constant-steer motion primitives integrated through the vehicle model,
so returned paths replay exactly. Every sub-step of every primitive must be
collision-free and keep the hitch angle within its limit.

Goal acceptance is tolerance-based on the trailer axle: a path finishes when
the axle is within the spot's position tolerance and the trailer heading
within its heading tolerance. Primitives are checked sub-step by sub-step, so
the final primitive truncates at the first sub-step that satisfies the goal.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate

from .geometry import Pose2, normalize_angle
from .vehicle import (
    ArticulatedState,
    ControlInput,
    VehicleParams,
    step_batch,
    step_raw,
    trailer_axle,
)
from .world import Scenario

PLANNER_SPEED = 1.0  # [m/s] primitive integration speed; paths are speed-invariant
SUBSTEP_TARGET = 0.2  # [m] maximum sub-step arc length
PI = math.pi
TWO_PI = 2.0 * math.pi

# f = g + H_WEIGHT * h. Inflating the admissible heuristic trades bounded
# suboptimality (a factor of H_WEIGHT) for a far smaller explored frontier;
# parking queries otherwise drown in near-flat cost plateaus while the
# trailer heading rotates. Determinism is unaffected.
H_WEIGHT = 3.0


def _turn_cost_per_radian(params: VehicleParams, cfg) -> float:
    """Minimum cost per radian of trailer-heading change.

    The trailer turns at |v| sin|gamma| / trailer_length and valid paths keep
    |gamma| within the hitch limit, so each radian needs at least
    trailer_length / sin(max_hitch) meters of driving. Rotation also cannot
    dodge the hitch penalty: integrated |gamma| over the turn is at least
    trailer_length per radian, which the cost model charges at
    hitch_penalty / primitive_len per meter. Both bounds vanish into pure
    arc length when penalties are neutral.
    """
    arc = params.trailer_length / math.sin(min(params.max_hitch, 0.5 * math.pi))
    penalty = cfg.hitch_penalty * params.trailer_length / cfg.primitive_len
    return arc + penalty

# Worst-case ratio of an 8-connected grid path to the continuous shortest
# path; dividing grid distances by it keeps the heuristic admissible.
DIAG_FACTOR = math.sqrt(4.0 - 2.0 * math.sqrt(2.0))


class NoPathFound(RuntimeError):
    """Search exhausted its node budget or the open set emptied."""

    def __init__(self, expansions: int, reason: str):
        super().__init__(f"no path found after {expansions} expansions ({reason})")
        self.expansions = expansions
        self.reason = reason


class InvalidSpot(ValueError):
    """Requested spot id does not exist in the scenario."""


@dataclass
class PlannedPath:
    """Dense kinematically-feasible path: one state per integration sub-step.

    controls[i] applied to states[i] over dt seconds reproduces states[i+1];
    directions[i] is +1 forward / -1 reverse for the same transition.
    """

    states: list[ArticulatedState]
    controls: list[ControlInput]
    directions: list[int]
    cost: float
    dt: float

    def arc_length(self) -> float:
        total = 0.0
        for a, b in zip(self.states, self.states[1:]):
            total += math.hypot(b.x - a.x, b.y - a.y)
        return total


@dataclass
class SearchNode:
    """One expanded search state; substates hold the incoming primitive."""

    state: ArticulatedState
    g: float = 0.0
    steer: float = 0.0
    direction: int = 0
    substates: tuple[ArticulatedState, ...] = ()


def _wrap(a: float) -> float:
    # single-period wrap; sub-step heading increments are far below 2*pi
    if a > PI:
        return a - TWO_PI
    if a <= -PI:
        return a + TWO_PI
    return a


def _substep(primitive_len: float) -> tuple[int, float]:
    nsub = max(1, int(math.ceil(primitive_len / SUBSTEP_TARGET - 1e-9)))
    return nsub, primitive_len / nsub


def _run_primitive(
    state4, steer, direction, nsub, dt_sub, params, checker, goal_test=None
):
    """Integrate one primitive; stop early on violation or goal.

    Returns (substates, gamma_abs_sum, goal_index, valid) where substates is
    the list of valid (x, y, psi, psi_t) tuples produced so far. goal_index
    is the sub-step where goal_test fired, or None. Collision checks are
    skipped over sub-steps covered by the checker's free-span certificate.
    """
    x, y, psi, psi_t = state4
    v = direction * PLANNER_SPEED
    max_hitch = params.max_hitch
    sub_move = checker.motion_factor * PLANNER_SPEED * dt_sub
    subs = []
    gamma_sum = 0.0
    certified = 0  # sub-steps still covered by the last free-span read
    for j in range(nsub):
        x, y, psi, psi_t = step_raw(x, y, psi, psi_t, v, steer, dt_sub, params)
        psi = _wrap(psi)
        psi_t = _wrap(psi_t)
        gamma = _wrap(psi - psi_t)
        if abs(gamma) > max_hitch:
            return subs, gamma_sum, None, False
        if certified > 0:
            certified -= 1
        else:
            free, span = checker.state_free_span(x, y, psi, psi_t)
            if not free:
                return subs, gamma_sum, None, False
            certified = int(span / sub_move - 1e-9)
        subs.append((x, y, psi, psi_t))
        gamma_sum += abs(gamma)
        if goal_test is not None and goal_test(x, y, psi, psi_t):
            return subs, gamma_sum, j, True
    return subs, gamma_sum, None, True


def _transition_cost(cfg, arc, direction, steer, parent_direction, parent_steer,
                     mean_gamma) -> float:
    cost = arc * (cfg.reverse_penalty if direction < 0 else 1.0)
    if parent_direction != 0 and direction != parent_direction:
        cost += cfg.switch_penalty
    cost += cfg.steer_change_penalty * abs(steer - parent_steer)
    cost += cfg.hitch_penalty * mean_gamma
    return cost


def expand(node: SearchNode, sc: Scenario) -> list[SearchNode]:
    """All valid successors of a node: one per (steer, direction) pair.

    A successor is dropped if any of its sub-steps collides or exceeds the
    hitch limit. Successor cost accumulates arc length (weighted in reverse),
    the direction-switch penalty, the steering-change penalty, and the
    mean-|hitch| penalty.
    """
    cfg = sc.planner
    checker = sc.checker()
    nsub, sub_len = _substep(cfg.primitive_len)
    dt_sub = sub_len / PLANNER_SPEED
    out = []
    state4 = node.state.as_tuple()
    for direction in (1, -1):
        for steer in cfg.steer_set:
            subs, gamma_sum, _, ok = _run_primitive(
                state4, steer, direction, nsub, dt_sub, sc.vehicle, checker
            )
            if not ok:
                continue
            g = node.g + _transition_cost(
                cfg, nsub * sub_len, direction, steer,
                node.direction, node.steer, gamma_sum / nsub,
            )
            out.append(
                SearchNode(
                    state=ArticulatedState(*subs[-1]),
                    g=g,
                    steer=steer,
                    direction=direction,
                    substates=tuple(ArticulatedState(*s) for s in subs),
                )
            )
    return out


# ---------------------------------------------------------------------------
# Holonomic heuristic
# ---------------------------------------------------------------------------

class HolonomicField:
    """Obstacle-aware 8-connected grid distance field seeded at one goal point.

    Cells whose centers fall inside an obstacle are blocked. Distances are
    geometric (orthogonal step = cell size, diagonal = sqrt(2) times it) and
    measured from cell center to the goal cell center.
    """

    def __init__(self, sc: Scenario, goal_x: float, goal_y: float):
        self.res = sc.planner.xy_res
        x_min, y_min, x_max, y_max = sc.bounds
        self.x_min = x_min
        self.y_min = y_min
        self.nx = max(1, int(math.ceil((x_max - x_min) / self.res)))
        self.ny = max(1, int(math.ceil((y_max - y_min) / self.res)))
        blocked = np.zeros((self.nx, self.ny), dtype=bool)
        xs = x_min + (np.arange(self.nx) + 0.5) * self.res
        ys = y_min + (np.arange(self.ny) + 0.5) * self.res
        for box in sc.obstacles:
            r = box.circumradius()
            i_lo = max(0, int((box.center.x - r - x_min) / self.res) - 1)
            i_hi = min(self.nx, int((box.center.x + r - x_min) / self.res) + 2)
            j_lo = max(0, int((box.center.y - r - y_min) / self.res) - 1)
            j_hi = min(self.ny, int((box.center.y + r - y_min) / self.res) + 2)
            if i_lo >= i_hi or j_lo >= j_hi:
                continue
            gx, gy = np.meshgrid(xs[i_lo:i_hi], ys[j_lo:j_hi], indexing="ij")
            c = math.cos(box.center.heading)
            s = math.sin(box.center.heading)
            dx = gx - box.center.x
            dy = gy - box.center.y
            u = dx * c + dy * s
            w = -dx * s + dy * c
            inside = (np.abs(u) <= 0.5 * box.length) & (np.abs(w) <= 0.5 * box.width)
            blocked[i_lo:i_hi, j_lo:j_hi] |= inside
        self.dist = np.full((self.nx, self.ny), np.inf)
        gi = int((goal_x - x_min) / self.res)
        gj = int((goal_y - y_min) / self.res)
        if 0 <= gi < self.nx and 0 <= gj < self.ny and not blocked[gi, gj]:
            self._dijkstra(blocked, gi, gj)
        self._flat = self.dist.ravel().tolist()

    def _dijkstra(self, blocked, gi, gj):
        res = self.res
        diag = res * math.sqrt(2.0)
        moves = (
            (1, 0, res), (-1, 0, res), (0, 1, res), (0, -1, res),
            (1, 1, diag), (1, -1, diag), (-1, 1, diag), (-1, -1, diag),
        )
        dist = self.dist
        dist[gi, gj] = 0.0
        heap = [(0.0, gi, gj)]
        while heap:
            d, i, j = heapq.heappop(heap)
            if d > dist[i, j]:
                continue
            for di, dj, cost in moves:
                ni, nj = i + di, j + dj
                if 0 <= ni < self.nx and 0 <= nj < self.ny and not blocked[ni, nj]:
                    nd = d + cost
                    if nd < dist[ni, nj]:
                        dist[ni, nj] = nd
                        heapq.heappush(heap, (nd, ni, nj))

    def distance_at(self, x: float, y: float) -> float:
        i = int((x - self.x_min) / self.res)
        j = int((y - self.y_min) / self.res)
        if 0 <= i < self.nx and 0 <= j < self.ny:
            return self._flat[i * self.ny + j]
        return math.inf


def holonomic_field(sc: Scenario, goal: Pose2) -> HolonomicField:
    """Field for one goal point, cached on the scenario."""
    key = (round(goal.x, 9), round(goal.y, 9))
    cached = sc._heuristic_fields.get(key)
    if cached is None:
        cached = HolonomicField(sc, goal.x, goal.y)
        sc._heuristic_fields[key] = cached
    return cached


def heuristic(
    s: ArticulatedState,
    goal: Pose2,
    sc: Scenario,
    pos_tol: float = 0.0,
    heading_tol: float = 0.0,
    field: HolonomicField | None = None,
) -> float:
    """Admissible cost-to-go toward the goal trailer-axle pose.

    Maximum of three lower bounds on the remaining driven arc length:
    straight-line trailer-axle distance, the obstacle-aware grid distance
    (deflated by the 8-connected overestimation factor and the cell
    quantization margin), and the arc needed to rotate the trailer heading
    within the hitch-angle limit. pos_tol/heading_tol account for goal
    acceptance stopping short.
    """
    if field is None:
        field = holonomic_field(sc, goal)
    ax, ay = trailer_axle(s, sc.vehicle)
    h = math.hypot(ax - goal.x, ay - goal.y) - pos_tol
    d = field.distance_at(ax, ay)
    if math.isfinite(d):
        h = max(h, d / DIAG_FACTOR - math.sqrt(2.0) * field.res - pos_tol)
    turn = abs(normalize_angle(s.psi_t - goal.heading)) - heading_tol
    h = max(h, _turn_cost_per_radian(sc.vehicle, sc.planner) * turn)
    return max(0.0, h)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def plan(sc: Scenario, spot_id: int) -> PlannedPath:
    """Search for a collision-free, hitch-bounded path into a parking spot.

    Deterministic for a fixed scenario and config: ties on f break toward
    larger g (deeper nodes), then insertion order. Raises InvalidSpot for an
    unknown id and NoPathFound (carrying the expansion count) when the open
    set empties or the node budget runs out.
    """
    spot = sc.spot(spot_id)
    if spot is None:
        raise InvalidSpot(f"spot {spot_id} not in scenario")
    cfg = sc.planner
    params = sc.vehicle
    checker = sc.checker()
    nsub, sub_len = _substep(cfg.primitive_len)
    dt_sub = sub_len / PLANNER_SPEED
    goal = spot.goal
    cos_goal = math.cos(goal.heading)
    sin_goal = math.sin(goal.heading)
    d_h = params.hitch_offset
    l_t = params.trailer_length
    pos_tol2 = spot.pos_tol * spot.pos_tol

    def goal_test(x, y, psi, psi_t) -> bool:
        ct = math.cos(psi_t)
        st = math.sin(psi_t)
        ax = x - d_h * math.cos(psi) - l_t * ct
        ay = y - d_h * math.sin(psi) - l_t * st
        dx = ax - goal.x
        dy = ay - goal.y
        if dx * dx + dy * dy > pos_tol2:
            return False
        # |wrap(psi_t - goal.heading)| via the dot/cross of the two headings
        return abs(math.atan2(st * cos_goal - ct * sin_goal,
                              ct * cos_goal + st * sin_goal)) <= spot.heading_tol

    start = sc.start
    if goal_test(*start.as_tuple()):
        return PlannedPath([start], [], [], 0.0, dt_sub)

    hfield = holonomic_field(sc, goal)
    grid_slack = math.sqrt(2.0) * hfield.res
    turn_arc = _turn_cost_per_radian(params, cfg)

    def hval(x, y, psi, psi_t) -> float:
        ax = x - d_h * math.cos(psi) - l_t * math.cos(psi_t)
        ay = y - d_h * math.sin(psi) - l_t * math.sin(psi_t)
        h = math.hypot(ax - goal.x, ay - goal.y) - spot.pos_tol
        d = hfield.distance_at(ax, ay)
        if d != math.inf:
            h2 = d / DIAG_FACTOR - grid_slack - spot.pos_tol
            if h2 > h:
                h = h2
        turn = abs(_wrap(psi_t - goal.heading)) - spot.heading_tol
        h3 = turn_arc * turn
        if h3 > h:
            h = h3
        return h if h > 0.0 else 0.0

    res = cfg.xy_res
    psi_binw = TWO_PI / cfg.psi_bins
    psit_binw = TWO_PI / cfg.psi_t_bins

    def key_of(x, y, psi, psi_t):
        return (
            int(math.floor(x / res)),
            int(math.floor(y / res)),
            int((psi + PI) / psi_binw) % cfg.psi_bins,
            int((psi_t + PI) / psit_binw) % cfg.psi_t_bins,
        )

    # node record: (x, y, psi, psi_t, g, steer, direction, parent, nsub_used)
    nodes = [(*start.as_tuple(), 0.0, 0.0, 0, -1, 0)]
    start_key = key_of(*start.as_tuple())
    best_g = {start_key: 0.0}
    closed = set()
    counter = 0
    heap = [(H_WEIGHT * hval(*start.as_tuple()), 0.0, counter, 0)]
    expansions = 0
    goal_node = None

    while heap:
        f, neg_g, _, idx = heapq.heappop(heap)
        rec = nodes[idx]
        state4 = rec[0:4]
        g = rec[4]
        key = key_of(*state4)
        if key in closed or g > best_g.get(key, math.inf) + 1e-12:
            continue
        closed.add(key)
        if expansions >= cfg.node_budget:
            raise NoPathFound(expansions, "node budget exhausted")
        expansions += 1
        parent_steer = rec[5]
        parent_dir = rec[6]
        goal_hit = None  # cheapest goal-reaching primitive of this expansion
        for direction in (1, -1):
            for steer in cfg.steer_set:
                subs, gamma_sum, goal_idx, ok = _run_primitive(
                    state4, steer, direction, nsub, dt_sub, params, checker, goal_test
                )
                if goal_idx is not None:
                    used = goal_idx + 1
                    g_goal = g + _transition_cost(
                        cfg, used * sub_len, direction, steer,
                        parent_dir, parent_steer, gamma_sum / used,
                    )
                    if goal_hit is None or g_goal < goal_hit[0] - 1e-12:
                        goal_hit = (g_goal, subs[-1], steer, direction, used)
                    continue
                if not ok:
                    continue
                end = subs[-1]
                nkey = key_of(*end)
                if nkey in closed:
                    continue
                g_new = g + _transition_cost(
                    cfg, nsub * sub_len, direction, steer,
                    parent_dir, parent_steer, gamma_sum / nsub,
                )
                if g_new >= best_g.get(nkey, math.inf) - 1e-12:
                    continue
                best_g[nkey] = g_new
                nodes.append((*end, g_new, steer, direction, idx, nsub))
                counter += 1
                heapq.heappush(
                    heap,
                    (g_new + H_WEIGHT * hval(*end), -g_new, counter, len(nodes) - 1),
                )
        if goal_hit is not None:
            g_goal, end, steer, direction, used = goal_hit
            nodes.append((*end, g_goal, steer, direction, idx, used))
            goal_node = len(nodes) - 1
            break

    if goal_node is None:
        raise NoPathFound(expansions, "open set exhausted")

    return _extract_path(nodes, goal_node, start, sub_len, dt_sub, params)


def _extract_path(nodes, idx, start, sub_len, dt_sub, params) -> PlannedPath:
    chain = []
    cost = nodes[idx][4]
    while idx >= 0:
        rec = nodes[idx]
        chain.append((rec[5], rec[6], rec[8]))
        idx = rec[7]
    chain.reverse()  # chain[0] is the root marker with nsub = 0
    states = [start]
    controls = []
    directions = []
    x, y, psi, psi_t = start.as_tuple()
    for steer, direction, used in chain[1:]:
        v = direction * PLANNER_SPEED
        for _ in range(used):
            x, y, psi, psi_t = step_raw(x, y, psi, psi_t, v, steer, dt_sub, params)
            psi = _wrap(psi)
            psi_t = _wrap(psi_t)
            states.append(ArticulatedState(x, y, psi, psi_t))
            controls.append(ControlInput(v, steer))
            directions.append(direction)
    return PlannedPath(states, controls, directions, cost, dt_sub)


# ---------------------------------------------------------------------------
# Smoothing
# ---------------------------------------------------------------------------

def smooth(p: PlannedPath, sc: Scenario) -> PlannedPath:
    """Reshape each same-direction segment along a fitted cubic B-spline.

    The spline (endpoints pinned) supplies a curvature profile that is turned
    back into steering controls; the segment is then re-integrated through
    the vehicle model so the result still replays exactly, and a small
    Gauss-Newton pass pins the integrated endpoint back onto the original
    segment endpoint. If any segment fails to pin, or the re-integrated path
    violates collision or hitch constraints, the input path is returned
    unchanged.
    """
    if len(p.states) < 3 or not p.controls:
        return p
    params = sc.vehicle
    checker = sc.checker()

    segments = []
    seg_start = 0
    for i in range(1, len(p.directions)):
        if p.directions[i] != p.directions[i - 1]:
            segments.append((seg_start, i, p.directions[seg_start]))
            seg_start = i
    segments.append((seg_start, len(p.directions), p.directions[seg_start]))

    new_states = [p.states[0]]
    new_controls: list[ControlInput] = []
    new_directions: list[int] = []
    changed = False
    for i0, i1, direction in segments:
        seg_states = p.states[i0 : i1 + 1]
        seg_controls = p.controls[i0:i1]
        n = i1 - i0
        straight = all(abs(c.delta) < 1e-12 for c in seg_controls)
        if n < 4 or straight:
            new_states.extend(seg_states[1:])
            new_controls.extend(seg_controls)
            new_directions.extend(p.directions[i0:i1])
            continue
        smoothed = _smooth_segment(seg_states, direction, p.dt, params)
        if smoothed is None:
            return p
        roll_states, roll_controls = smoothed
        changed = True
        new_states.extend(roll_states[1:])
        new_controls.extend(roll_controls)
        new_directions.extend([direction] * len(roll_controls))

    if not changed:
        return p
    for st in new_states:
        if abs(normalize_angle(st.psi - st.psi_t)) > params.max_hitch:
            return p
        if not checker.state_free(st.x, st.y, st.psi, st.psi_t):
            return p
    return PlannedPath(new_states, new_controls, new_directions, p.cost, p.dt)


def _smooth_segment(seg_states, direction, dt_sub, params):
    sub_len = PLANNER_SPEED * dt_sub
    xs = np.array([s.x for s in seg_states])
    ys = np.array([s.y for s in seg_states])
    weights = np.ones(len(xs))
    weights[0] = weights[-1] = 1e4  # pin endpoints
    try:
        tck, _ = interpolate.splprep(
            [xs, ys], w=weights, s=0.25 * len(xs) * sub_len**2, k=3
        )
    except (ValueError, TypeError):
        return None

    dense = np.linspace(0.0, 1.0, 20 * len(xs))
    dx, dy = interpolate.splev(dense, tck, der=1)
    speed = np.hypot(dx, dy)
    arc = np.concatenate(([0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(dense))))
    total = float(arc[-1])
    m = max(3, int(math.ceil(total / sub_len - 1e-9)))
    s_last = total - (m - 1) * sub_len
    s_last = min(max(s_last, 0.2 * sub_len), 1.5 * sub_len)

    # curvature at the arc position of each transition midpoint
    targets = np.minimum((np.arange(m) + 0.5) * sub_len, total)
    u_at = np.interp(targets, arc, dense)
    d1x, d1y = interpolate.splev(u_at, tck, der=1)
    d2x, d2y = interpolate.splev(u_at, tck, der=2)
    denom = np.maximum(np.hypot(d1x, d1y) ** 3, 1e-12)
    kappa = (d1x * d2y - d1y * d2x) / denom
    deltas = np.clip(
        np.arctan(params.wheelbase * kappa * direction),
        -params.max_steer,
        params.max_steer,
    )

    start4 = np.array(seg_states[0].as_tuple())
    target = np.array(seg_states[-1].as_tuple())

    def endpoints(Z: np.ndarray) -> np.ndarray:
        batch = Z.shape[0]
        states = np.tile(start4, (batch, 1))
        for j in range(m):
            if j == m - 1:
                v = direction * Z[:, m] / dt_sub
            else:
                v = np.full(batch, float(direction) * PLANNER_SPEED)
            states = step_batch(states, v, Z[:, j], dt_sub, params)
        return states

    def residual(end: np.ndarray) -> np.ndarray:
        e = end - target
        e[2:] = e[2:] - TWO_PI * np.round(e[2:] / TWO_PI)
        return e

    def project(z: np.ndarray) -> np.ndarray:
        z = z.copy()
        z[:m] = np.clip(z[:m], -params.max_steer, params.max_steer)
        z[m] = min(max(z[m], 0.05 * sub_len), 1.5 * sub_len)
        return z

    z = project(np.concatenate([deltas, [s_last]]))
    err = residual(endpoints(z[None, :])[0])
    eps = 1e-6
    converged = False
    for _ in range(12):
        if np.max(np.abs(err)) < 5e-5:
            converged = True
            break
        batch = np.tile(z, (2 * (m + 1), 1))
        cols = np.arange(m + 1)
        batch[2 * cols, cols] += eps
        batch[2 * cols + 1, cols] -= eps
        ends = endpoints(batch)
        J = np.empty((4, m + 1))
        for c in range(m + 1):
            diff = ends[2 * c] - ends[2 * c + 1]
            diff[2:] = diff[2:] - TWO_PI * np.round(diff[2:] / TWO_PI)
            J[:, c] = diff / (2 * eps)
        dz = np.linalg.lstsq(J, err, rcond=None)[0]
        improved = False
        scale = 1.0
        for _ in range(6):
            z_try = project(z - scale * dz)
            err_try = residual(endpoints(z_try[None, :])[0])
            if np.max(np.abs(err_try)) < np.max(np.abs(err)):
                z, err = z_try, err_try
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
    if not converged and np.max(np.abs(err)) >= 5e-5:
        return None

    # final rollout, then snap the endpoint exactly onto the original
    states = [seg_states[0]]
    controls = []
    x, y, psi, psi_t = start4
    for j in range(m):
        v = direction * (z[m] / dt_sub if j == m - 1 else PLANNER_SPEED)
        x, y, psi, psi_t = step_raw(x, y, psi, psi_t, v, float(z[j]), dt_sub, params)
        psi = _wrap(psi)
        psi_t = _wrap(psi_t)
        states.append(ArticulatedState(x, y, psi, psi_t))
        controls.append(ControlInput(float(v), float(z[j])))
    states[-1] = seg_states[-1]
    return states, controls


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def trajectory_csv(states, controls, directions) -> str:
    """Fixed-format trajectory table shared by planner and simulator output."""
    lines = ["t_index,x,y,psi,psi_t,v,delta,direction"]
    for i, s in enumerate(states):
        if i < len(controls):
            v, delta = controls[i].v, controls[i].delta
            d = directions[i]
        else:
            v = delta = 0.0
            d = directions[-1] if directions else 1
        lines.append(
            f"{i},{s.x:.6f},{s.y:.6f},{s.psi:.6f},{s.psi_t:.6f},"
            f"{v:.6f},{delta:.6f},{d}"
        )
    return "\n".join(lines) + "\n"


def path_to_csv(p: PlannedPath) -> str:
    return trajectory_csv(p.states, p.controls, p.directions)

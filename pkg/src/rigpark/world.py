"""Scenario model: lot bounds, obstacles, parking spots, file I/O, collisions.

A scenario file is a strict JSON document (unknown keys rejected) with
top-level keys `bounds`, `vehicle`, `start`, `obstacles`, `spots`, `planner`,
`controller`. Angles are radians, lengths meters. save_scenario() writes the
canonical form: sorted keys, two-space indent, 6-decimal fixed floats (exact
repr fallback for values a 6-decimal string cannot represent).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .config import SearchConfig, TrackConfig
from .geometry import OrientedBox, Pose2, boxes_overlap, corners_overlap
from .vehicle import (
    ArticulatedState,
    BodyDims,
    VehicleParams,
    default_params,
    footprints,
)

CLEARANCE_RES = 0.25  # [m] cell size of the obstacle clearance field


class ScenarioError(ValueError):
    """Raised for scenario parse or validation failures."""


@dataclass(frozen=True)
class ParkingSpot:
    """Target trailer-axle pose at rest plus acceptance tolerances."""

    spot_id: int
    goal: Pose2
    pos_tol: float
    heading_tol: float


@dataclass
class Scenario:
    """Immutable-after-load description of one parking problem.

    bounds is the axis-aligned lot rectangle (x_min, y_min, x_max, y_max).
    Treat instances as read-only; the planner and simulator share them
    across threads.
    """

    bounds: tuple[float, float, float, float]
    vehicle: VehicleParams
    start: ArticulatedState
    obstacles: list[OrientedBox]
    spots: list[ParkingSpot]
    planner: SearchConfig = field(default_factory=SearchConfig)
    controller: TrackConfig = field(default_factory=TrackConfig)

    def __post_init__(self):
        self._checker: CollisionChecker | None = None
        self._heuristic_fields: dict = {}

    def checker(self) -> "CollisionChecker":
        if self._checker is None:
            self._checker = CollisionChecker(self)
        return self._checker

    def spot(self, spot_id: int) -> ParkingSpot | None:
        for s in self.spots:
            if s.spot_id == spot_id:
                return s
        return None


class CollisionChecker:
    """Precomputed collision queries for one scenario.

    Obstacles are rasterized conservatively (any cell whose square touches an
    obstacle counts as occupied) into a clearance field, so a distance lookup
    can prove a footprint free without running the separating-axis test.
    """

    def __init__(self, sc: Scenario):
        self.bounds = sc.bounds
        self.params = sc.vehicle
        self._obstacles = [
            (box, box.corners(), box.center.heading, box.circumradius())
            for box in sc.obstacles
        ]
        x_min, y_min, x_max, y_max = sc.bounds
        self._res = CLEARANCE_RES
        self._nx = max(1, int(math.ceil((x_max - x_min) / self._res)))
        self._ny = max(1, int(math.ceil((y_max - y_min) / self._res)))
        occupied = np.zeros((self._nx, self._ny), dtype=bool)
        half = 0.5 * self._res * math.sqrt(2.0)
        for box, corners, heading, radius in self._obstacles:
            i_lo = max(0, int((box.center.x - radius - half - x_min) / self._res))
            i_hi = min(self._nx - 1, int((box.center.x + radius + half - x_min) / self._res))
            j_lo = max(0, int((box.center.y - radius - half - y_min) / self._res))
            j_hi = min(self._ny - 1, int((box.center.y + radius + half - y_min) / self._res))
            for i in range(i_lo, i_hi + 1):
                cx = x_min + (i + 0.5) * self._res
                for j in range(j_lo, j_hi + 1):
                    cy = y_min + (j + 0.5) * self._res
                    cell = [
                        (cx - 0.5 * self._res, cy - 0.5 * self._res),
                        (cx + 0.5 * self._res, cy - 0.5 * self._res),
                        (cx + 0.5 * self._res, cy + 0.5 * self._res),
                        (cx - 0.5 * self._res, cy + 0.5 * self._res),
                    ]
                    if corners_overlap(corners, cell, heading, 0.0):
                        occupied[i, j] = True
        if occupied.any():
            clearance = ndimage.distance_transform_edt(~occupied) * self._res
        else:
            clearance = np.full((self._nx, self._ny), np.inf)
        self._clearance = clearance.ravel().tolist()  # flat list: fast scalar reads
        # lookup error: query-to-cell-center plus obstacle-to-cell-center
        self._margin = self._res * math.sqrt(2.0)
        # Upper bound on body-center travel per meter of rear-axle arc length,
        # used to certify several integration sub-steps from one clearance read.
        p = sc.vehicle
        off_tractor = abs(0.5 * p.tractor_body.length - p.tractor_body.rear_overhang)
        off_trailer = abs(0.5 * p.trailer_body.length - p.trailer_body.rear_overhang)
        spin = math.tan(p.max_steer) / p.wheelbase
        k_tractor = 1.0 + off_tractor * spin
        k_trailer = 1.0 + p.hitch_offset * spin + off_trailer / p.trailer_length
        self.motion_factor = max(k_tractor, k_trailer)

    def clearance_at(self, x: float, y: float) -> float:
        x_min, y_min, _, _ = self.bounds
        i = min(max(int((x - x_min) / self._res), 0), self._nx - 1)
        j = min(max(int((y - y_min) / self._res), 0), self._ny - 1)
        return self._clearance[i * self._ny + j]

    def _corners_in_bounds(self, corners) -> bool:
        x_min, y_min, x_max, y_max = self.bounds
        for x, y in corners:
            if x < x_min or x > x_max or y < y_min or y > y_max:
                return False
        return True

    def box_free(self, box: OrientedBox) -> bool:
        """True iff the box is fully inside bounds and misses every obstacle."""
        corners = box.corners()
        if not self._corners_in_bounds(corners):
            return False
        radius = box.circumradius()
        if self.clearance_at(box.center.x, box.center.y) > radius + self._margin:
            return True
        for obox, ocorners, oheading, oradius in self._obstacles:
            dx = obox.center.x - box.center.x
            dy = obox.center.y - box.center.y
            if math.hypot(dx, dy) > radius + oradius:
                continue
            if corners_overlap(corners, ocorners, box.center.heading, oheading):
                return False
        return True

    def state_free(self, x: float, y: float, psi: float, psi_t: float) -> bool:
        """box_free() of both rig footprints, on raw floats (planner hot path)."""
        return self.state_free_span(x, y, psi, psi_t)[0]

    def state_free_span(
        self, x: float, y: float, psi: float, psi_t: float
    ) -> tuple[bool, float]:
        """Collision verdict plus a certified-free movement radius.

        The second value is a distance both body centers may travel from here
        while provably staying in bounds and clear of obstacles (0 when the
        state sits too close to decide without exact tests).
        """
        p = self.params
        cp, sp = math.cos(psi), math.sin(psi)
        tb = p.tractor_body
        off = 0.5 * tb.length - tb.rear_overhang
        free, span_a = self._body_free_span(x + off * cp, y + off * sp, cp, sp, tb)
        if not free:
            return False, 0.0
        hx = x - p.hitch_offset * cp
        hy = y - p.hitch_offset * sp
        ct, st = math.cos(psi_t), math.sin(psi_t)
        ax = hx - p.trailer_length * ct
        ay = hy - p.trailer_length * st
        rb = p.trailer_body
        off_t = 0.5 * rb.length - rb.rear_overhang
        free, span_b = self._body_free_span(ax + off_t * ct, ay + off_t * st, ct, st, rb)
        if not free:
            return False, 0.0
        return True, min(span_a, span_b)

    def _body_free_span(self, cx, cy, c, s, body: BodyDims) -> tuple[bool, float]:
        hl = 0.5 * body.length
        hw = 0.5 * body.width
        radius = math.hypot(hl, hw)
        x_min, y_min, x_max, y_max = self.bounds
        slack = min(cx - x_min, x_max - cx, cy - y_min, y_max - cy) - radius
        if slack < 0.0:
            corners = (
                (cx + hl * c - hw * s, cy + hl * s + hw * c),
                (cx - hl * c - hw * s, cy - hl * s + hw * c),
                (cx - hl * c + hw * s, cy - hl * s - hw * c),
                (cx + hl * c + hw * s, cy + hl * s - hw * c),
            )
            if not self._corners_in_bounds(corners):
                return False, 0.0
            slack = 0.0
        headroom = self.clearance_at(cx, cy) - self._margin - radius
        if headroom > 0.0:
            return True, min(slack, headroom)
        corners = (
            (cx + hl * c - hw * s, cy + hl * s + hw * c),
            (cx - hl * c - hw * s, cy - hl * s + hw * c),
            (cx - hl * c + hw * s, cy - hl * s - hw * c),
            (cx + hl * c + hw * s, cy + hl * s - hw * c),
        )
        heading = math.atan2(s, c)
        for obox, ocorners, oheading, oradius in self._obstacles:
            if math.hypot(obox.center.x - cx, obox.center.y - cy) > radius + oradius:
                continue
            if corners_overlap(corners, ocorners, heading, oheading):
                return False, 0.0
        return True, 0.0


def collision_free(s: ArticulatedState, sc: Scenario) -> bool:
    """True iff both footprint boxes lie inside bounds and overlap no obstacle."""
    return sc.checker().state_free(s.x, s.y, s.psi, s.psi_t)


def validate_scenario(sc: Scenario) -> None:
    """Check every scenario invariant; raise ScenarioError naming the first violation."""
    x_min, y_min, x_max, y_max = sc.bounds
    if not (x_min < x_max and y_min < y_max):
        raise ScenarioError("bounds: must satisfy x_min < x_max and y_min < y_max")
    sc.planner.validate(max_steer=sc.vehicle.max_steer)
    sc.controller.validate()
    seen_ids = set()
    for spot in sc.spots:
        name = f"spot {spot.spot_id}"
        if spot.spot_id in seen_ids:
            raise ScenarioError(f"{name}: duplicate spot id")
        seen_ids.add(spot.spot_id)
        if not spot.pos_tol > 0.0:
            raise ScenarioError(f"{name}: pos_tol must be positive")
        if not spot.heading_tol > 0.0:
            raise ScenarioError(f"{name}: heading_tol must be positive")
        if not (x_min <= spot.goal.x <= x_max and y_min <= spot.goal.y <= y_max):
            raise ScenarioError(f"{name}: goal lies outside bounds")
    tractor, trailer = footprints(sc.start, sc.vehicle)
    checker = sc.checker()
    for label, box in (("tractor", tractor), ("trailer", trailer)):
        if not checker._corners_in_bounds(box.corners()):
            raise ScenarioError(f"start: {label} footprint outside bounds")
    for idx, obstacle in enumerate(sc.obstacles):
        if boxes_overlap(tractor, obstacle) or boxes_overlap(trailer, obstacle):
            raise ScenarioError(f"start in collision with obstacle {idx}")


# ---------------------------------------------------------------------------
# Scenario file I/O
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    text = format(float(x), ".6f")
    if float(text) == float(x):
        return text
    return repr(float(x))


def _emit(value, indent: int, out: list) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        out.append("{")
        keys = sorted(value)
        for i, key in enumerate(keys):
            out.append(f"\n{pad}  {json.dumps(key)}: ")
            _emit(value[key], indent + 1, out)
            if i + 1 < len(keys):
                out.append(",")
        out.append(f"\n{pad}}}")
    elif isinstance(value, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            parts = []
            for v in value:
                sub: list = []
                _emit(v, 0, sub)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
        else:
            out.append("[")
            for i, v in enumerate(value):
                out.append(f"\n{pad}  ")
                _emit(v, indent + 1, out)
                if i + 1 < len(value):
                    out.append(",")
            out.append(f"\n{pad}]")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(_fmt_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    else:
        raise TypeError(f"cannot serialize {type(value)!r}")


def _dumps(doc: dict) -> str:
    out: list = []
    _emit(doc, 0, out)
    return "".join(out) + "\n"


def _body_doc(body: BodyDims) -> dict:
    return {
        "length": body.length,
        "width": body.width,
        "rear_overhang": body.rear_overhang,
    }


def save_scenario(sc: Scenario) -> str:
    """Serialize a scenario to its canonical file form (deterministic bytes)."""
    x_min, y_min, x_max, y_max = sc.bounds
    doc = {
        "bounds": {"x_min": x_min, "y_min": y_min, "x_max": x_max, "y_max": y_max},
        "vehicle": {
            "wheelbase": sc.vehicle.wheelbase,
            "trailer_length": sc.vehicle.trailer_length,
            "hitch_offset": sc.vehicle.hitch_offset,
            "tractor_body": _body_doc(sc.vehicle.tractor_body),
            "trailer_body": _body_doc(sc.vehicle.trailer_body),
            "max_steer": sc.vehicle.max_steer,
            "max_hitch": sc.vehicle.max_hitch,
            "v_min": sc.vehicle.v_min,
            "v_max": sc.vehicle.v_max,
        },
        "start": {
            "x": sc.start.x,
            "y": sc.start.y,
            "psi": sc.start.psi,
            "psi_t": sc.start.psi_t,
        },
        "obstacles": [
            {
                "x": box.center.x,
                "y": box.center.y,
                "heading": box.center.heading,
                "length": box.length,
                "width": box.width,
            }
            for box in sc.obstacles
        ],
        "spots": [
            {
                "id": spot.spot_id,
                "x": spot.goal.x,
                "y": spot.goal.y,
                "heading": spot.goal.heading,
                "pos_tol": spot.pos_tol,
                "heading_tol": spot.heading_tol,
            }
            for spot in sc.spots
        ],
        "planner": {
            "xy_res": sc.planner.xy_res,
            "psi_bins": sc.planner.psi_bins,
            "psi_t_bins": sc.planner.psi_t_bins,
            "primitive_len": sc.planner.primitive_len,
            "steer_set": list(sc.planner.steer_set),
            "reverse_penalty": sc.planner.reverse_penalty,
            "switch_penalty": sc.planner.switch_penalty,
            "steer_change_penalty": sc.planner.steer_change_penalty,
            "hitch_penalty": sc.planner.hitch_penalty,
            "node_budget": sc.planner.node_budget,
        },
        "controller": {
            "controller": sc.controller.controller,
            "dt": sc.controller.dt,
            "q_diag": list(sc.controller.q_diag),
            "r_diag": list(sc.controller.r_diag),
            "nmpc_horizon": sc.controller.nmpc_horizon,
            "nmpc_lambda": sc.controller.nmpc_lambda,
            "nmpc_iters": sc.controller.nmpc_iters,
            "nmpc_step": sc.controller.nmpc_step,
            "dare_tol": sc.controller.dare_tol,
            "dare_max_iters": sc.controller.dare_max_iters,
        },
    }
    return _dumps(doc)


def _strict_keys(d: dict, allowed: set, path: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ScenarioError(f"{path}: unknown key '{sorted(unknown)[0]}'")
    missing = allowed - set(d)
    if missing:
        raise ScenarioError(f"{path}: missing key '{sorted(missing)[0]}'")


def _num(d: dict, key: str, path: str) -> float:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{path}.{key}: expected a number")
    if not math.isfinite(float(v)):
        raise ScenarioError(f"{path}.{key}: must be finite")
    return float(v)


def _int(d: dict, key: str, path: str) -> int:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(f"{path}.{key}: expected an integer")
    return v


def _num_list(d: dict, key: str, path: str, n: int | None = None) -> list[float]:
    v = d[key]
    if not isinstance(v, list):
        raise ScenarioError(f"{path}.{key}: expected an array")
    if n is not None and len(v) != n:
        raise ScenarioError(f"{path}.{key}: expected {n} values")
    out = []
    for item in v:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ScenarioError(f"{path}.{key}: expected numbers")
        out.append(float(item))
    return out


def _parse_body(d: dict, path: str) -> BodyDims:
    _strict_keys(d, {"length", "width", "rear_overhang"}, path)
    try:
        return BodyDims(
            _num(d, "length", path), _num(d, "width", path), _num(d, "rear_overhang", path)
        )
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def load_scenario(text: str) -> Scenario:
    """Parse and fully validate a scenario document.

    Raises ScenarioError with a line locus on malformed JSON, and with the
    offending field/invariant name on schema or validation failures.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: top level must be an object")
    _strict_keys(
        doc,
        {"bounds", "vehicle", "start", "obstacles", "spots", "planner", "controller"},
        "scenario",
    )

    b = doc["bounds"]
    _strict_keys(b, {"x_min", "y_min", "x_max", "y_max"}, "bounds")
    bounds = (
        _num(b, "x_min", "bounds"),
        _num(b, "y_min", "bounds"),
        _num(b, "x_max", "bounds"),
        _num(b, "y_max", "bounds"),
    )

    v = doc["vehicle"]
    _strict_keys(
        v,
        {
            "wheelbase", "trailer_length", "hitch_offset", "tractor_body",
            "trailer_body", "max_steer", "max_hitch", "v_min", "v_max",
        },
        "vehicle",
    )
    try:
        vehicle = VehicleParams(
            wheelbase=_num(v, "wheelbase", "vehicle"),
            trailer_length=_num(v, "trailer_length", "vehicle"),
            hitch_offset=_num(v, "hitch_offset", "vehicle"),
            tractor_body=_parse_body(v["tractor_body"], "vehicle.tractor_body"),
            trailer_body=_parse_body(v["trailer_body"], "vehicle.trailer_body"),
            max_steer=_num(v, "max_steer", "vehicle"),
            max_hitch=_num(v, "max_hitch", "vehicle"),
            v_min=_num(v, "v_min", "vehicle"),
            v_max=_num(v, "v_max", "vehicle"),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"vehicle: {exc}") from exc

    s = doc["start"]
    _strict_keys(s, {"x", "y", "psi", "psi_t"}, "start")
    start = ArticulatedState(
        _num(s, "x", "start"), _num(s, "y", "start"),
        _num(s, "psi", "start"), _num(s, "psi_t", "start"),
    )

    if not isinstance(doc["obstacles"], list):
        raise ScenarioError("obstacles: expected an array")
    obstacles = []
    for i, o in enumerate(doc["obstacles"]):
        path = f"obstacles[{i}]"
        _strict_keys(o, {"x", "y", "heading", "length", "width"}, path)
        try:
            obstacles.append(
                OrientedBox(
                    Pose2(_num(o, "x", path), _num(o, "y", path), _num(o, "heading", path)),
                    _num(o, "length", path),
                    _num(o, "width", path),
                )
            )
        except ValueError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"{path}: {exc}") from exc

    if not isinstance(doc["spots"], list):
        raise ScenarioError("spots: expected an array")
    spots = []
    for i, p in enumerate(doc["spots"]):
        path = f"spots[{i}]"
        _strict_keys(p, {"id", "x", "y", "heading", "pos_tol", "heading_tol"}, path)
        spots.append(
            ParkingSpot(
                spot_id=_int(p, "id", path),
                goal=Pose2(_num(p, "x", path), _num(p, "y", path), _num(p, "heading", path)),
                pos_tol=_num(p, "pos_tol", path),
                heading_tol=_num(p, "heading_tol", path),
            )
        )

    pl = doc["planner"]
    _strict_keys(
        pl,
        {
            "xy_res", "psi_bins", "psi_t_bins", "primitive_len", "steer_set",
            "reverse_penalty", "switch_penalty", "steer_change_penalty",
            "hitch_penalty", "node_budget",
        },
        "planner",
    )
    planner = SearchConfig(
        xy_res=_num(pl, "xy_res", "planner"),
        psi_bins=_int(pl, "psi_bins", "planner"),
        psi_t_bins=_int(pl, "psi_t_bins", "planner"),
        primitive_len=_num(pl, "primitive_len", "planner"),
        steer_set=tuple(_num_list(pl, "steer_set", "planner")),
        reverse_penalty=_num(pl, "reverse_penalty", "planner"),
        switch_penalty=_num(pl, "switch_penalty", "planner"),
        steer_change_penalty=_num(pl, "steer_change_penalty", "planner"),
        hitch_penalty=_num(pl, "hitch_penalty", "planner"),
        node_budget=_int(pl, "node_budget", "planner"),
    )

    c = doc["controller"]
    _strict_keys(
        c,
        {
            "controller", "dt", "q_diag", "r_diag", "nmpc_horizon",
            "nmpc_lambda", "nmpc_iters", "nmpc_step", "dare_tol", "dare_max_iters",
        },
        "controller",
    )
    if not isinstance(c["controller"], str):
        raise ScenarioError("controller.controller: expected a string")
    controller = TrackConfig(
        controller=c["controller"],
        dt=_num(c, "dt", "controller"),
        q_diag=tuple(_num_list(c, "q_diag", "controller", 4)),
        r_diag=tuple(_num_list(c, "r_diag", "controller", 2)),
        nmpc_horizon=_int(c, "nmpc_horizon", "controller"),
        nmpc_lambda=_num(c, "nmpc_lambda", "controller"),
        nmpc_iters=_int(c, "nmpc_iters", "controller"),
        nmpc_step=_num(c, "nmpc_step", "controller"),
        dare_tol=_num(c, "dare_tol", "controller"),
        dare_max_iters=_int(c, "dare_max_iters", "controller"),
    )

    sc = Scenario(
        bounds=bounds,
        vehicle=vehicle,
        start=start,
        obstacles=obstacles,
        spots=spots,
        planner=planner,
        controller=controller,
    )
    try:
        validate_scenario(sc)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    return sc


# ---------------------------------------------------------------------------
# Builtin 24-spot lot
# ---------------------------------------------------------------------------

OCCUPIED_SPOT_IDS = frozenset({2, 5, 7, 10, 14, 17, 19, 22})

_SPOT_DEPTH = 16.0
_SPOT_WIDTH = 4.0
_FIRST_SPOT_X = 18.0
_BOTTOM_GOAL_Y = 8.0
_TOP_GOAL_Y = 52.0
_QUARTER_TURN = 1.570796  # kept on the 6-decimal grid so files round-trip exactly


def spot_outline(spot: ParkingSpot) -> OrientedBox:
    """The 16 m x 4 m bay rectangle a builtin-layout spot occupies."""
    c = math.cos(spot.goal.heading)
    s = math.sin(spot.goal.heading)
    center = Pose2(spot.goal.x + 4.0 * c, spot.goal.y + 4.0 * s, spot.goal.heading)
    return OrientedBox(center, _SPOT_DEPTH, _SPOT_WIDTH)


def builtin_lot() -> Scenario:
    """The fixed 24-spot lot: two facing rows of 12 perpendicular spots.

    80 m x 60 m bounds, a 20 m aisle between the rows, 8 spots occupied by
    parked-trailer obstacles, start in the aisle at the west entrance with a
    straight rig. Construction is deterministic: repeated calls serialize to
    identical bytes.
    """
    spots = []
    obstacles = []
    for i in range(12):
        x = _FIRST_SPOT_X + _SPOT_WIDTH * i
        spots.append(
            ParkingSpot(i, Pose2(x, _BOTTOM_GOAL_Y, _QUARTER_TURN), 0.3, 0.087266)
        )
        spots.append(
            ParkingSpot(12 + i, Pose2(x, _TOP_GOAL_Y, -_QUARTER_TURN), 0.3, 0.087266)
        )
    spots.sort(key=lambda s: s.spot_id)
    for spot in spots:
        if spot.spot_id in OCCUPIED_SPOT_IDS:
            c = math.cos(spot.goal.heading)
            s = math.sin(spot.goal.heading)
            obstacles.append(
                OrientedBox(
                    Pose2(
                        spot.goal.x + 3.5 * c,
                        spot.goal.y + 3.5 * s,
                        spot.goal.heading,
                    ),
                    13.0,
                    2.6,
                )
            )
    sc = Scenario(
        bounds=(0.0, 0.0, 80.0, 60.0),
        vehicle=default_params(),
        start=ArticulatedState(14.0, 30.0, 0.0, 0.0),
        obstacles=obstacles,
        spots=spots,
    )
    validate_scenario(sc)
    return sc


def free_spots(sc: Scenario) -> list[ParkingSpot]:
    """Spots whose goal trailer placement is in bounds and clear of obstacles."""
    out = []
    checker = sc.checker()
    for spot in sc.spots:
        c = math.cos(spot.goal.heading)
        s = math.sin(spot.goal.heading)
        rb = sc.vehicle.trailer_body
        off = 0.5 * rb.length - rb.rear_overhang
        box = OrientedBox(
            Pose2(spot.goal.x + off * c, spot.goal.y + off * s, spot.goal.heading),
            rb.length,
            rb.width,
        )
        if checker.box_free(box):
            out.append(spot)
    return out

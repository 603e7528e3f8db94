"""Tractor-trailer kinematic model.

State is the tractor rear-axle pose plus the trailer heading. The tractor
follows the kinematic bicycle model and drags the trailer through the hitch:

    x' = v cos(psi)
    y' = v sin(psi)
    psi' = (v / L) tan(delta)
    psi_t' = (v / L_t) sin(psi - psi_t)

where L is the tractor wheelbase and L_t the hitch-to-trailer-axle distance.
The trailer equation makes reversing unstable: with delta = 0 and v < 0 the
hitch angle grows exponentially, which is the jackknife mechanism the rest of
the package guards against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import OrientedBox, Pose2, normalize_angle


@dataclass(frozen=True)
class BodyDims:
    """Rectangular body: overall length/width and rear-axle-to-rear-end overhang."""

    length: float
    width: float
    rear_overhang: float

    def __post_init__(self):
        if not (self.length > 0.0 and self.width > 0.0):
            raise ValueError("body length and width must be positive")
        if not (0.0 <= self.rear_overhang <= self.length):
            raise ValueError("rear_overhang must lie within the body length")


@dataclass(frozen=True)
class VehicleParams:
    """Geometry and actuation limits of the rig.

    wheelbase: tractor rear-to-front axle distance [m]
    trailer_length: hitch point to trailer axle [m]
    hitch_offset: tractor rear axle to hitch point, positive rearward [m]
    max_steer: front steering limit [rad], < pi/2
    max_hitch: admissible |tractor - trailer heading| [rad]; beyond it the
        rig counts as jackknifed
    v_min/v_max: signed speed limits [m/s], v_min < 0 < v_max
    """

    wheelbase: float
    trailer_length: float
    hitch_offset: float
    tractor_body: BodyDims
    trailer_body: BodyDims
    max_steer: float
    max_hitch: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not (self.wheelbase > 0.0 and self.trailer_length > 0.0):
            raise ValueError("wheelbase and trailer_length must be positive")
        if self.hitch_offset < 0.0:
            raise ValueError("hitch_offset must be >= 0")
        if not (0.0 < self.max_steer < 0.5 * math.pi):
            raise ValueError("max_steer must be in (0, pi/2)")
        if not (0.0 < self.max_hitch < math.pi):
            raise ValueError("max_hitch must be in (0, pi)")
        if not (self.v_min < 0.0 < self.v_max):
            raise ValueError("speed limits must satisfy v_min < 0 < v_max")


def default_params() -> VehicleParams:
    """Engineering defaults used by the builtin lot (mid-size European rig)."""
    return VehicleParams(
        wheelbase=3.8,
        trailer_length=8.5,
        hitch_offset=0.0,
        tractor_body=BodyDims(length=6.0, width=2.5, rear_overhang=1.0),
        trailer_body=BodyDims(length=10.0, width=2.5, rear_overhang=3.5),
        max_steer=0.55,
        max_hitch=1.047,
        v_min=-2.0,
        v_max=2.0,
    )


@dataclass(frozen=True)
class ArticulatedState:
    """Tractor rear-axle position, tractor heading psi, trailer heading psi_t."""

    x: float
    y: float
    psi: float
    psi_t: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("state coordinates must be finite")
        object.__setattr__(self, "psi", normalize_angle(self.psi))
        object.__setattr__(self, "psi_t", normalize_angle(self.psi_t))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.psi, self.psi_t)


@dataclass(frozen=True)
class ControlInput:
    """Signed speed [m/s] (negative = reverse) and front steering angle [rad]."""

    v: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.delta)):
            raise ValueError("control values must be finite")

    def clamped(self, params: VehicleParams) -> "ControlInput":
        v = min(max(self.v, params.v_min), params.v_max)
        d = min(max(self.delta, -params.max_steer), params.max_steer)
        return ControlInput(v, d)


def step_raw(
    x: float,
    y: float,
    psi: float,
    psi_t: float,
    v: float,
    delta: float,
    dt: float,
    params: VehicleParams,
) -> tuple[float, float, float, float]:
    """One RK4 step on raw floats; headings are not renormalized here.

    Hot-path variant of step() used by the planner's primitive integrator.
    The tractor heading rate is constant over the step, so its stages
    coincide and the position update collapses to a Simpson sum.
    """
    w = v * math.tan(delta) / params.wheelbase
    lt = params.trailer_length
    h = 0.5 * dt
    p2 = psi + h * w
    p4 = psi + dt * w
    g1 = v * math.sin(psi - psi_t) / lt
    g2 = v * math.sin(p2 - (psi_t + h * g1)) / lt
    g3 = v * math.sin(p2 - (psi_t + h * g2)) / lt
    g4 = v * math.sin(p4 - (psi_t + dt * g3)) / lt
    sixth = dt / 6.0
    return (
        x + sixth * v * (math.cos(psi) + 4.0 * math.cos(p2) + math.cos(p4)),
        y + sixth * v * (math.sin(psi) + 4.0 * math.sin(p2) + math.sin(p4)),
        p4,
        psi_t + sixth * (g1 + 2.0 * g2 + 2.0 * g3 + g4),
    )


def step(
    s: ArticulatedState, u: ControlInput, dt: float, params: VehicleParams
) -> ArticulatedState:
    """Integrate the rig over dt seconds with constant control (RK4)."""
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive and finite, got {dt!r}")
    x, y, psi, psi_t = step_raw(s.x, s.y, s.psi, s.psi_t, u.v, u.delta, dt, params)
    return ArticulatedState(x, y, normalize_angle(psi), normalize_angle(psi_t))


def step_batch(states: np.ndarray, v: np.ndarray, delta: np.ndarray, dt: float,
               params: VehicleParams) -> np.ndarray:
    """Vectorized RK4 step.

    states: (B, 4) array of (x, y, psi, psi_t); v, delta: (B,) arrays.
    Returns the (B, 4) successor array with headings renormalized.
    """
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive and finite, got {dt!r}")
    td = np.tan(delta)

    def f(s):
        return np.stack(
            [
                v * np.cos(s[:, 2]),
                v * np.sin(s[:, 2]),
                v * td / params.wheelbase,
                v * np.sin(s[:, 2] - s[:, 3]) / params.trailer_length,
            ],
            axis=1,
        )

    k1 = f(states)
    k2 = f(states + 0.5 * dt * k1)
    k3 = f(states + 0.5 * dt * k2)
    k4 = f(states + dt * k3)
    out = states + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out[:, 2:] = np.arctan2(np.sin(out[:, 2:]), np.cos(out[:, 2:]))
    return out


def hitch_angle(s: ArticulatedState) -> float:
    """Signed hitch angle gamma = psi - psi_t, wrapped to (-pi, pi]."""
    return normalize_angle(s.psi - s.psi_t)


def is_jackknifed(s: ArticulatedState, params: VehicleParams) -> bool:
    """True iff |gamma| strictly exceeds the hitch limit (boundary is admissible)."""
    return abs(hitch_angle(s)) > params.max_hitch


def hitch_point(s: ArticulatedState, params: VehicleParams) -> tuple[float, float]:
    return (
        s.x - params.hitch_offset * math.cos(s.psi),
        s.y - params.hitch_offset * math.sin(s.psi),
    )


def trailer_axle(s: ArticulatedState, params: VehicleParams) -> tuple[float, float]:
    """Trailer axle midpoint: hitch point minus trailer_length along psi_t."""
    hx, hy = hitch_point(s, params)
    return (
        hx - params.trailer_length * math.cos(s.psi_t),
        hy - params.trailer_length * math.sin(s.psi_t),
    )


def footprints(
    s: ArticulatedState, params: VehicleParams
) -> tuple[OrientedBox, OrientedBox]:
    """Oriented body boxes of (tractor, trailer) at the given state."""
    cp, sp = math.cos(s.psi), math.sin(s.psi)
    tb = params.tractor_body
    off = 0.5 * tb.length - tb.rear_overhang
    tractor = OrientedBox(Pose2(s.x + off * cp, s.y + off * sp, s.psi), tb.length, tb.width)

    ax, ay = trailer_axle(s, params)
    ct, st = math.cos(s.psi_t), math.sin(s.psi_t)
    rb = params.trailer_body
    off_t = 0.5 * rb.length - rb.rear_overhang
    trailer = OrientedBox(Pose2(ax + off_t * ct, ay + off_t * st, s.psi_t), rb.length, rb.width)
    return tractor, trailer

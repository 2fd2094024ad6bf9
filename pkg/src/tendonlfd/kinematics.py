"""Tendon-driven continuum robot model: routing, statics and forward kinematics.

The rod model is a simplified Kirchhoff rod: inextensible, shear-free,
frictionless, no gravity. Tendon loads enter as distributed moments computed
from the routing geometry only; the body-frame curvature at arc length s is

    u(s) = K^-1 * sum_i tau_i * (t_i(s) x r_i(s)),   K = diag(EI, EI, GJ)

with r_i the tendon offset in the cross-section plane and t_i the unit
tendon-path tangent. Straight tendons therefore produce constant-curvature
arcs (the closed-form oracle used in tests) and helical tendons produce
non-planar shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DimensionMismatch, EmptyShape, InvalidConfig

TWO_PI = 2.0 * math.pi


def wrap_angle(b: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    return (b + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class TendonRouting:
    kind: str  # "straight" or "helical"
    offset_radius: float  # m, distance from the backbone axis
    phase: float  # rad, angular position at s=0
    revolutions: float = 0.0  # total turns base to tip, sign = handedness

    def __post_init__(self):
        if self.kind not in ("straight", "helical"):
            raise ValueError(f"unknown routing kind {self.kind!r}")
        if self.offset_radius <= 0:
            raise ValueError("offset_radius must be > 0")
        if self.kind == "straight" and self.revolutions != 0.0:
            raise ValueError("straight routing requires revolutions = 0")


@dataclass(frozen=True)
class RobotSpec:
    length: float  # m
    backbone_radius: float  # m
    bending_stiffness: float  # N*m^2 (EI)
    torsional_stiffness: float  # N*m^2 (GJ)
    tendons: tuple[TendonRouting, ...]
    tension_max: tuple[float, ...]  # N, per tendon
    insertion_max: float  # m
    insertion_enabled: bool = False
    rotation_enabled: bool = False

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be > 0")
        if self.bending_stiffness <= 0 or self.torsional_stiffness <= 0:
            raise ValueError("stiffnesses must be > 0")
        if len(self.tendons) < 1:
            raise ValueError("need at least one tendon")
        if len(self.tension_max) != len(self.tendons):
            raise ValueError("tension_max must have one entry per tendon")
        if any(t <= 0 for t in self.tension_max):
            raise ValueError("tension_max must be > 0 elementwise")
        if not (0 < self.insertion_max <= self.length):
            raise ValueError("insertion_max must be in (0, length]")
        for t in self.tendons:
            if t.offset_radius > self.backbone_radius:
                raise ValueError("tendon offset_radius exceeds backbone radius")

    @property
    def n_tendons(self) -> int:
        return len(self.tendons)

    @property
    def dof_count(self) -> int:
        return self.n_tendons + int(self.insertion_enabled) + int(self.rotation_enabled)

    def routing_array(self) -> np.ndarray:
        """Pack tendon routing into an (N, 4) float array for the jit core."""
        arr = np.zeros((self.n_tendons, 4))
        for i, t in enumerate(self.tendons):
            arr[i] = (1.0 if t.kind == "helical" else 0.0,
                      t.offset_radius, t.phase, t.revolutions)
        return arr

    def tension_max_array(self) -> np.ndarray:
        return np.asarray(self.tension_max, dtype=float)


@dataclass
class Config:
    """Actuation state: per-tendon tensions, insertion length, base rotation."""

    tensions: np.ndarray  # (N,) N of force
    insertion: float  # m
    rotation: float  # rad, in [-pi, pi)

    def __post_init__(self):
        self.tensions = np.asarray(self.tensions, dtype=float)

    def copy(self) -> "Config":
        return Config(self.tensions.copy(), self.insertion, self.rotation)


@dataclass(frozen=True)
class Frame:
    position: np.ndarray  # (3,)
    orientation: np.ndarray  # (3,3) rotation matrix


@dataclass
class BackboneShape:
    """FK output: frames at uniform arc-length steps over the deployed length."""

    positions: np.ndarray  # (n+1, 3)
    orientations: np.ndarray  # (n+1, 3, 3)
    arc_step: float  # m

    @property
    def frames(self) -> list[Frame]:
        return [Frame(self.positions[i], self.orientations[i])
                for i in range(len(self.positions))]

    def __len__(self) -> int:
        return len(self.positions)


def validate_config(spec: RobotSpec, config: Config) -> None:
    """Raise InvalidConfig if config violates the spec's actuation limits."""
    tmax = spec.tension_max_array()
    if config.tensions.shape != (spec.n_tendons,):
        raise InvalidConfig(f"expected {spec.n_tendons} tensions")
    if np.any(config.tensions < 0) or np.any(config.tensions > tmax):
        raise InvalidConfig("tension out of [0, tension_max]")
    if not spec.insertion_enabled:
        if config.insertion != spec.insertion_max:
            raise InvalidConfig("insertion disabled: insertion must equal insertion_max")
    elif not (0 <= config.insertion <= spec.insertion_max):
        raise InvalidConfig("insertion out of [0, insertion_max]")
    if not spec.rotation_enabled:
        if config.rotation != 0.0:
            raise InvalidConfig("rotation disabled: rotation must be 0")
    elif not (-math.pi <= config.rotation < math.pi):
        raise InvalidConfig("rotation out of [-pi, pi)")
    if not (np.all(np.isfinite(config.tensions))
            and math.isfinite(config.insertion) and math.isfinite(config.rotation)):
        raise InvalidConfig("non-finite configuration value")


def neutral_config(spec: RobotSpec) -> Config:
    """Zero-tension configuration at full insertion, zero rotation."""
    return Config(np.zeros(spec.n_tendons), spec.insertion_max, 0.0)


def clamp_config(spec: RobotSpec, raw: np.ndarray) -> Config:
    """Clip an unconstrained DOF vector into a valid Config.

    The vector is ordered [tensions..., insertion?, rotation?] with the
    optional entries present only when the corresponding DOF is enabled.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (spec.dof_count,):
        raise DimensionMismatch(
            f"expected {spec.dof_count} DOF values, got {raw.shape}")
    n = spec.n_tendons
    tensions = np.clip(raw[:n], 0.0, spec.tension_max_array())
    i = n
    if spec.insertion_enabled:
        insertion = float(np.clip(raw[i], 0.0, spec.insertion_max))
        i += 1
    else:
        insertion = spec.insertion_max
    rotation = wrap_angle(float(raw[i])) if spec.rotation_enabled else 0.0
    return Config(tensions, insertion, rotation)


def config_vector(spec: RobotSpec, config: Config) -> np.ndarray:
    """Enabled-DOF vector for a Config (inverse of clamp_config on valid input)."""
    parts = [config.tensions]
    if spec.insertion_enabled:
        parts.append([config.insertion])
    if spec.rotation_enabled:
        parts.append([config.rotation])
    return np.concatenate([np.atleast_1d(np.asarray(p, dtype=float)) for p in parts])


def routing_offset(routing: TendonRouting, s: float, length: float):
    """Tendon offset r(s) and its arc-length derivative in the cross-section plane."""
    d = routing.offset_radius
    if routing.kind == "straight":
        r = np.array([d * math.cos(routing.phase), d * math.sin(routing.phase), 0.0])
        return r, np.zeros(3)
    theta = routing.phase + TWO_PI * routing.revolutions * s / length
    dtheta = TWO_PI * routing.revolutions / length
    r = np.array([d * math.cos(theta), d * math.sin(theta), 0.0])
    r_prime = np.array([-d * dtheta * math.sin(theta), d * dtheta * math.cos(theta), 0.0])
    return r, r_prime


@njit(cache=True)
def _curvature_core(routing, tensions, ei, gj, length, s):
    ux = 0.0
    uy = 0.0
    uz = 0.0
    for i in range(routing.shape[0]):
        d = routing[i, 1]
        phi = routing[i, 2]
        if routing[i, 0] != 0.0:
            theta = phi + TWO_PI * routing[i, 3] * s / length
            dtheta = TWO_PI * routing[i, 3] / length
            rx = d * math.cos(theta)
            ry = d * math.sin(theta)
            tpx = -d * dtheta * math.sin(theta)
            tpy = d * dtheta * math.cos(theta)
        else:
            rx = d * math.cos(phi)
            ry = d * math.sin(phi)
            tpx = 0.0
            tpy = 0.0
        nrm = math.sqrt(tpx * tpx + tpy * tpy + 1.0)
        tx = tpx / nrm
        ty = tpy / nrm
        tz = 1.0 / nrm
        tau = tensions[i]
        # moment direction t x r with r in the cross-section plane
        ux += tau * (-tz * ry)
        uy += tau * (tz * rx)
        uz += tau * (tx * ry - ty * rx)
    return ux / ei, uy / ei, uz / gj


@njit(cache=True, inline="always")
def _rot_skew(R, ux, uy, uz, out):
    # out = R @ skew([ux, uy, uz])
    for i in range(3):
        out[i, 0] = R[i, 1] * uz - R[i, 2] * uy
        out[i, 1] = R[i, 2] * ux - R[i, 0] * uz
        out[i, 2] = R[i, 0] * uy - R[i, 1] * ux


@njit(cache=True, inline="always")
def _polar_project(R, cof):
    # Newton iteration toward the orthogonal polar factor:
    # R <- (R + inv(R)^T) / 2, with inv(R)^T = cofactor(R) / det(R).
    for _ in range(2):
        cof[0, 0] = R[1, 1] * R[2, 2] - R[1, 2] * R[2, 1]
        cof[0, 1] = R[1, 2] * R[2, 0] - R[1, 0] * R[2, 2]
        cof[0, 2] = R[1, 0] * R[2, 1] - R[1, 1] * R[2, 0]
        cof[1, 0] = R[2, 1] * R[0, 2] - R[2, 2] * R[0, 1]
        cof[1, 1] = R[2, 2] * R[0, 0] - R[2, 0] * R[0, 2]
        cof[1, 2] = R[2, 0] * R[0, 1] - R[2, 1] * R[0, 0]
        cof[2, 0] = R[0, 1] * R[1, 2] - R[0, 2] * R[1, 1]
        cof[2, 1] = R[0, 2] * R[1, 0] - R[0, 0] * R[1, 2]
        cof[2, 2] = R[0, 0] * R[1, 1] - R[0, 1] * R[1, 0]
        det = R[0, 0] * cof[0, 0] + R[0, 1] * cof[0, 1] + R[0, 2] * cof[0, 2]
        for i in range(3):
            for j in range(3):
                R[i, j] = 0.5 * (R[i, j] + cof[i, j] / det)


@njit(cache=True)
def _fk_core(routing, tensions, ei, gj, length, insertion, beta, n_steps):
    h = insertion / n_steps
    ps = np.zeros((n_steps + 1, 3))
    rs = np.zeros((n_steps + 1, 3, 3))
    R = np.zeros((3, 3))
    cb = math.cos(beta)
    sb = math.sin(beta)
    R[0, 0] = cb
    R[0, 1] = -sb
    R[1, 0] = sb
    R[1, 1] = cb
    R[2, 2] = 1.0
    px = 0.0
    py = 0.0
    pz = 0.0
    rs[0] = R
    k1 = np.zeros((3, 3))
    k2 = np.zeros((3, 3))
    k3 = np.zeros((3, 3))
    k4 = np.zeros((3, 3))
    tmp = np.zeros((3, 3))
    cof = np.zeros((3, 3))
    for k in range(n_steps):
        s = k * h
        ux1, uy1, uz1 = _curvature_core(routing, tensions, ei, gj, length, s)
        uxm, uym, uzm = _curvature_core(routing, tensions, ei, gj, length, s + 0.5 * h)
        ux4, uy4, uz4 = _curvature_core(routing, tensions, ei, gj, length, s + h)

        _rot_skew(R, ux1, uy1, uz1, k1)
        dx = R[0, 2]
        dy = R[1, 2]
        dz = R[2, 2]

        for i in range(3):
            for j in range(3):
                tmp[i, j] = R[i, j] + 0.5 * h * k1[i, j]
        _rot_skew(tmp, uxm, uym, uzm, k2)
        dx += 2.0 * tmp[0, 2]
        dy += 2.0 * tmp[1, 2]
        dz += 2.0 * tmp[2, 2]

        for i in range(3):
            for j in range(3):
                tmp[i, j] = R[i, j] + 0.5 * h * k2[i, j]
        _rot_skew(tmp, uxm, uym, uzm, k3)
        dx += 2.0 * tmp[0, 2]
        dy += 2.0 * tmp[1, 2]
        dz += 2.0 * tmp[2, 2]

        for i in range(3):
            for j in range(3):
                tmp[i, j] = R[i, j] + h * k3[i, j]
        _rot_skew(tmp, ux4, uy4, uz4, k4)
        dx += tmp[0, 2]
        dy += tmp[1, 2]
        dz += tmp[2, 2]

        h6 = h / 6.0
        px += h6 * dx
        py += h6 * dy
        pz += h6 * dz
        for i in range(3):
            for j in range(3):
                R[i, j] += h6 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])

        _polar_project(R, cof)

        ps[k + 1, 0] = px
        ps[k + 1, 1] = py
        ps[k + 1, 2] = pz
        rs[k + 1] = R
    return ps, rs


def body_curvature(spec: RobotSpec, config: Config, s: float) -> np.ndarray:
    """Body-frame curvature u(s) in 1/m under the current tendon loads."""
    ux, uy, uz = _curvature_core(
        spec.routing_array(), config.tensions,
        spec.bending_stiffness, spec.torsional_stiffness, spec.length, s)
    return np.array([ux, uy, uz])


def forward_kinematics(spec: RobotSpec, config: Config, n_steps: int = 200) -> BackboneShape:
    """Integrate the rod over s in [0, insertion] with fixed-step RK4.

    Returns n_steps + 1 frames; the base frame is the origin rotated by the
    base rotation about global z.
    """
    validate_config(spec, config)
    ps, rs = _fk_core(
        spec.routing_array(), config.tensions,
        spec.bending_stiffness, spec.torsional_stiffness,
        spec.length, config.insertion, config.rotation, n_steps)
    return BackboneShape(ps, rs, config.insertion / n_steps)


def fk_tip(spec: RobotSpec, config: Config, n_steps: int = 200) -> np.ndarray:
    """Tip position only (skips BackboneShape construction)."""
    validate_config(spec, config)
    ps, _ = _fk_core(
        spec.routing_array(), config.tensions,
        spec.bending_stiffness, spec.torsional_stiffness,
        spec.length, config.insertion, config.rotation, n_steps)
    return ps[-1]


def tip_position(shape: BackboneShape) -> np.ndarray:
    if len(shape.positions) == 0:
        raise EmptyShape("shape has no frames")
    return shape.positions[-1]

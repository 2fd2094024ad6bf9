"""Task environments, context sampling and synthetic demonstrators.

Three tasks: a figure-eight on a workspace plane, a curve over two stacked
spheres, and a diamond traced on the interior surface of an anatomy mesh.
Synthetic demonstrations stand in for human operators: a parametric oracle
curve, smooth bounded "hand tremor" noise, then feasibility snapping through
IK so every stored waypoint is a reachable tip position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyInput, ProjectionFailure, SchemaMismatch
from .ik import IkSettings, plan_config_trajectory
from .kinematics import RobotSpec, fk_tip, neutral_config
from .learning import ContextVector, TipTrajectory
from .mesh import Mesh, project_to_surface
from .metrics import resample_arclength

TWO_PI = 2.0 * math.pi


@dataclass
class EightParams:
    p_ref_min: np.ndarray  # (3,) corner of the start-point rectangle
    p_ref_max: np.ndarray
    w_range: tuple[float, float] = (0.01, 0.04)
    h_range: tuple[float, float] = (0.01, 0.04)


@dataclass
class SphereParams:
    p_ref_min: np.ndarray
    p_ref_max: np.ndarray
    radius_range: tuple[float, float] = (0.01, 0.03)
    sweep: float = 2.0 * math.pi / 3.0  # azimuth swept per sphere


@dataclass
class AnatomyParams:
    mesh_path: str
    nominal_p_ref: np.ndarray
    perturbation: float = 0.01  # m, per axis
    scale_range: tuple[float, float] = (0.5, 1.5)


# the traced diamond is a fixed pattern: its plane, center offset and size
# (relative to p_ref, scaled with the context's s) never vary with context
DIAMOND_CENTER = np.array([0.0, -0.015, 0.01])
DIAMOND_HALF_X = 0.022
DIAMOND_HALF_Z = 0.028


@dataclass
class TaskDef:
    variant: str  # eight_plane | double_sphere | anatomy
    eight: EightParams | None = None
    sphere: SphereParams | None = None
    anatomy: AnatomyParams | None = None

    def __post_init__(self):
        if self.variant not in ("eight_plane", "double_sphere", "anatomy"):
            raise ValueError(f"unknown task variant {self.variant!r}")
        params = {"eight_plane": self.eight, "double_sphere": self.sphere,
                  "anatomy": self.anatomy}[self.variant]
        if params is None:
            raise ValueError(f"missing parameters for variant {self.variant}")


@dataclass
class Demonstration:
    context: ContextVector
    trajectory: TipTrajectory
    meta: dict


def sample_context(task: TaskDef, rng: np.random.Generator) -> ContextVector:
    """Uniform context draw within the task's declared ranges."""
    if task.variant == "eight_plane":
        p = task.eight
        p_ref = rng.uniform(p.p_ref_min, p.p_ref_max)
        w = rng.uniform(*p.w_range)
        h = rng.uniform(*p.h_range)
        return ContextVector(np.concatenate([p_ref, [w, h, 1.0]]), "eight_plane")
    if task.variant == "double_sphere":
        p = task.sphere
        p_ref = rng.uniform(p.p_ref_min, p.p_ref_max)
        r1 = rng.uniform(*p.radius_range)
        r2 = rng.uniform(*p.radius_range)
        return ContextVector(np.concatenate([p_ref, [r1, r2, 1.0]]), "double_sphere")
    p = task.anatomy
    p_ref = np.asarray(p.nominal_p_ref, dtype=float) + rng.uniform(
        -p.perturbation, p.perturbation, size=3)
    s = rng.uniform(*p.scale_range)
    return ContextVector(np.concatenate([p_ref, [s, 1.0]]), "anatomy")


def oracle_eight(context: ContextVector, m: int) -> np.ndarray:
    """Closed self-intersecting figure-eight in the x-z plane through p_ref."""
    if context.schema != "eight_plane":
        raise SchemaMismatch("oracle_eight needs an eight_plane context")
    p_ref = context.values[:3]
    w, h = context.values[3], context.values[4]
    t = np.linspace(0.0, TWO_PI, m)
    pts = np.tile(p_ref, (m, 1))
    pts[:, 0] += w * np.sin(2.0 * t)
    pts[:, 2] += h * np.sin(t)
    return pts


def sphere_centers(context: ContextVector):
    """Centers of the two stacked spheres implied by a double_sphere context.

    Sphere 1 is placed so p_ref lies on its surface facing the robot (-y);
    sphere 2 sits on top of it along the world z axis.
    """
    p_ref = context.values[:3]
    r1, r2 = context.values[3], context.values[4]
    c1 = p_ref + np.array([0.0, r1, 0.0])
    c2 = c1 + np.array([0.0, 0.0, r1 + r2])
    return c1, c2


def oracle_double_sphere(context: ContextVector, m: int) -> np.ndarray:
    """Sweep from p_ref over sphere 1, through the tangency point, onto sphere 2."""
    if context.schema != "double_sphere":
        raise SchemaMismatch("oracle_double_sphere needs a double_sphere context")
    c1, c2 = sphere_centers(context)
    r1, r2 = context.values[3], context.values[4]
    sweep = 2.0 * math.pi / 3.0
    phi0 = -0.5 * math.pi  # azimuth of the -y start point

    def direction(u):
        # polar angle runs from the -y equator point up to the +z pole
        theta = 0.5 * math.pi * (1.0 - u)
        phi = phi0 + sweep * u
        return np.array([math.sin(theta) * math.cos(phi),
                         math.sin(theta) * math.sin(phi),
                         math.cos(theta)])

    pts = np.empty((m, 3))
    for i, t in enumerate(np.linspace(0.0, 1.0, m)):
        if t <= 0.5:
            pts[i] = c1 + r1 * direction(2.0 * t)
        else:
            d = direction(2.0 * (1.0 - t))
            d[2] = -d[2]  # mirror across the tangency plane
            pts[i] = c2 + r2 * d
    return pts


def oracle_anatomy(context: ContextVector, mesh: Mesh, m: int) -> np.ndarray:
    """Diamond traced on the transformed mesh surface, forward then reversed."""
    if context.schema != "anatomy":
        raise SchemaMismatch("oracle_anatomy needs an anatomy context")
    raise_if = mesh.diameter
    p_ref = context.values[:3]
    s = context.values[3]
    placed = mesh.transformed(s, mesh.centroid, p_ref)

    # diamond polygon in a fixed plane facing the interior, scaled with s
    center = p_ref + s * DIAMOND_CENTER
    dx = s * DIAMOND_HALF_X
    dz = s * DIAMOND_HALF_Z
    corners = np.array([
        center + [0.0, 0.0, dz],
        center + [dx, 0.0, 0.0],
        center + [0.0, 0.0, -dz],
        center + [-dx, 0.0, 0.0],
        center + [0.0, 0.0, dz],
    ])
    polygon = resample_arclength(corners, m)
    projected = np.empty_like(polygon)
    for i, p in enumerate(polygon):
        q = project_to_surface(placed, p)
        if np.linalg.norm(q - p) > raise_if:
            raise ProjectionFailure(f"point {p} projects farther than the mesh diameter")
        projected[i] = q
    return np.concatenate([projected, projected[-2::-1]])  # palindrome, 2m-1 points


def humanize(points: np.ndarray, amplitude: float, rng: np.random.Generator,
             smoothness: int = 3) -> np.ndarray:
    """Add smooth low-frequency perturbation, zero at both endpoints.

    Per axis, a sum of up to 3 random-phase sinusoids with the linear trend
    removed so the endpoints stay pinned; the whole perturbation is rescaled
    so the largest pointwise displacement equals `amplitude`.
    """
    points = np.asarray(points, dtype=float)
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    if amplitude == 0.0:
        return points.copy()
    n = len(points)
    t = np.linspace(0.0, 1.0, n)
    noise = np.zeros((n, 3))
    for axis in range(3):
        for _ in range(3):
            k = rng.integers(1, smoothness + 1)
            psi = rng.uniform(0.0, TWO_PI)
            a = rng.uniform(-1.0, 1.0)
            wave = np.sin(math.pi * k * t + psi)
            # subtract the chord so both endpoints are exactly zero
            wave -= (1.0 - t) * wave[0] + t * wave[-1]
            noise[:, axis] += a * wave
    max_norm = np.linalg.norm(noise, axis=1).max()
    if max_norm == 0.0:
        return points.copy()
    return points + (amplitude / max_norm) * noise


def snap_to_reachable(spec: RobotSpec, points, ik_settings: IkSettings | None = None):
    """Replace waypoints by the tip positions actually achieved through IK.

    Returns (TipTrajectory of achieved tips, per-waypoint IK residuals).
    """
    if ik_settings is None:
        ik_settings = IkSettings()
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        raise EmptyInput("no points to snap")
    plan = plan_config_trajectory(spec, points, neutral_config(spec), ik_settings)
    achieved = np.array([fk_tip(spec, c, ik_settings.fk_steps) for c in plan.waypoints])
    return TipTrajectory(achieved), plan.residuals


def generate_dataset(task: TaskDef, spec: RobotSpec, count: int, m: int = 50,
                     noise_amplitude: float = 0.002, seed: int = 0,
                     ik_settings: IkSettings | None = None,
                     mesh: Mesh | None = None) -> list[Demonstration]:
    """Synthetic demonstrations: sample context, oracle, humanize, snap, resample."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if task.variant == "anatomy" and mesh is None:
        raise ValueError("anatomy task needs the mesh")
    demos = []
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(count)):
        rng = np.random.default_rng(child)
        context = sample_context(task, rng)
        if task.variant == "eight_plane":
            raw = oracle_eight(context, m)
        elif task.variant == "double_sphere":
            raw = oracle_double_sphere(context, m)
        else:
            raw = oracle_anatomy(context, mesh, m)
        noisy = humanize(raw, noise_amplitude, rng)
        snapped, residuals = snap_to_reachable(spec, noisy, ik_settings)
        resampled = resample_arclength(snapped.waypoints, m)
        demos.append(Demonstration(
            context, TipTrajectory(resampled),
            {"task": task.variant, "source": "synthetic", "seed": seed,
             "index": i, "mean_ik_residual": float(np.mean(residuals))}))
    return demos


def synthetic_cavity_mesh(n_theta: int = 28, n_phi: int = 44) -> Mesh:
    """Closed pleural-cavity-like blob used as the shipped anatomy fixture.

    A lobed, anisotropically squashed sphere centered in the robot's
    workspace; deterministic so the fixture file can be regenerated.
    """
    center = np.array([0.0, 0.0, 0.13])
    base_r = 0.055
    verts = []
    for i in range(1, n_theta):
        theta = math.pi * i / n_theta
        for j in range(n_phi):
            phi = TWO_PI * j / n_phi
            bump = (1.0 + 0.16 * math.sin(theta) * math.cos(phi)
                    - 0.10 * math.cos(2.0 * theta)
                    + 0.07 * math.sin(2.0 * theta) * math.sin(2.0 * phi))
            r = base_r * bump
            d = np.array([math.sin(theta) * math.cos(phi),
                          math.sin(theta) * math.sin(phi),
                          math.cos(theta)])
            verts.append(center + r * d * np.array([0.9, 0.7, 1.0]))
    top = center + np.array([0.0, 0.0, base_r * 0.9])
    bottom = center - np.array([0.0, 0.0, base_r * 1.1])
    verts.append(top)
    verts.append(bottom)
    verts = np.array(verts)
    i_top = len(verts) - 2
    i_bot = len(verts) - 1

    tris = []
    def vid(i, j):
        return i * n_phi + (j % n_phi)
    for j in range(n_phi):
        tris.append([i_top, vid(0, j), vid(0, j + 1)])
        tris.append([i_bot, vid(n_theta - 2, j + 1), vid(n_theta - 2, j)])
    for i in range(n_theta - 2):
        for j in range(n_phi):
            a, b = vid(i, j), vid(i, j + 1)
            c, d = vid(i + 1, j), vid(i + 1, j + 1)
            tris.append([a, b, d])
            tris.append([a, d, c])
    return Mesh(verts, np.array(tris))

"""Damped-least-squares inverse kinematics for tip-position targets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularUpdate
from .kinematics import (
    Config,
    RobotSpec,
    clamp_config,
    config_vector,
    fk_tip,
)


@dataclass
class IkSettings:
    damping: float = 1e-3  # lambda
    fd_step: float = 1e-4  # finite-difference step per DOF unit
    tol: float = 1e-4  # m
    max_iters: int = 200
    step_scale: float = 1.0
    fk_steps: int = 200
    restart_seed: int = 0  # seeds the stall-escape restarts

    def __post_init__(self):
        if self.damping <= 0:
            raise ValueError("damping must be > 0")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class ConfigTrajectory:
    """Configuration-space trajectory executing a workspace trajectory."""

    waypoints: list[Config]
    residuals: np.ndarray  # m, per waypoint

    def __len__(self) -> int:
        return len(self.waypoints)


def tip_jacobian(spec: RobotSpec, config: Config, fd_step: float = 1e-4,
                 fk_steps: int = 200) -> np.ndarray:
    """3 x d tip Jacobian by central finite differences over the enabled DOFs.

    Probe configs are clamped to the actuation limits, which degrades to a
    one-sided difference at a bound.
    """
    q = config_vector(spec, config)
    d = len(q)
    jac = np.zeros((3, d))
    for j in range(d):
        qp = q.copy()
        qp[j] += fd_step
        qm = q.copy()
        qm[j] -= fd_step
        cp = clamp_config(spec, qp)
        cm = clamp_config(spec, qm)
        vp = config_vector(spec, cp)[j]
        vm = config_vector(spec, cm)[j]
        denom = vp - vm
        if denom == 0.0:
            continue
        jac[:, j] = (fk_tip(spec, cp, fk_steps) - fk_tip(spec, cm, fk_steps)) / denom
    return jac


def ik_step(spec: RobotSpec, config: Config, target: np.ndarray,
            settings: IkSettings) -> Config:
    """One damped-least-squares update with backtracking.

    The returned config's tip error never exceeds the input's.
    """
    target = np.asarray(target, dtype=float)
    tip = fk_tip(spec, config, settings.fk_steps)
    err = target - tip
    err_norm = np.linalg.norm(err)
    if err_norm == 0.0:
        return config.copy()

    jac = tip_jacobian(spec, config, settings.fd_step, settings.fk_steps)
    a = jac @ jac.T + settings.damping ** 2 * np.eye(3)
    try:
        y = np.linalg.solve(a, err)
    except np.linalg.LinAlgError as exc:
        raise SingularUpdate("JJ^T + lambda^2 I is singular") from exc
    if not np.all(np.isfinite(y)):
        raise SingularUpdate("non-finite DLS update (damping too small)")
    dq = jac.T @ y

    q = config_vector(spec, config)
    sigma = settings.step_scale
    for _ in range(9):
        cand = clamp_config(spec, q + sigma * dq)
        cand_err = np.linalg.norm(target - fk_tip(spec, cand, settings.fk_steps))
        if cand_err <= err_norm:
            return cand
        sigma *= 0.5
    return config.copy()


def solve_ik(spec: RobotSpec, seed: Config, target: np.ndarray,
             settings: IkSettings | None = None):
    """Iterate ik_step until the tip residual drops below tol or iterations run out.

    Returns (best config, achieved tip, residual in m). Non-convergence is
    reported through the residual, never raised.
    """
    if settings is None:
        settings = IkSettings()
    target = np.asarray(target, dtype=float)
    rng = np.random.default_rng(settings.restart_seed)
    config = seed.copy()
    tip = fk_tip(spec, config, settings.fk_steps)
    best = (config, tip, float(np.linalg.norm(target - tip)))
    for _ in range(settings.max_iters):
        if best[2] < settings.tol:
            break
        new = ik_step(spec, config, target, settings)
        stalled = np.array_equal(config_vector(spec, new), config_vector(spec, config))
        config = new
        tip = fk_tip(spec, config, settings.fk_steps)
        res = float(np.linalg.norm(target - tip))
        if res < best[2]:
            best = (config, tip, res)
        if stalled:
            # local minimum against the actuation bounds; escape by
            # reseeding from a random valid configuration (deterministic rng)
            lo, hi = _dof_bounds(spec)
            config = clamp_config(spec, rng.uniform(lo, hi))
    return best


def _dof_bounds(spec: RobotSpec):
    lo = [0.0] * spec.n_tendons
    hi = list(spec.tension_max)
    if spec.insertion_enabled:
        lo.append(0.0)
        hi.append(spec.insertion_max)
    if spec.rotation_enabled:
        lo.append(-np.pi)
        hi.append(np.pi)
    return np.array(lo), np.array(hi)


def plan_config_trajectory(spec: RobotSpec, traj, seed: Config,
                           settings: IkSettings | None = None) -> ConfigTrajectory:
    """Solve IK per waypoint in order, warm-starting from the previous solution."""
    if settings is None:
        settings = IkSettings()
    points = np.asarray(getattr(traj, "waypoints", traj), dtype=float)
    if len(points) == 0:
        raise ValueError("empty trajectory")
    configs = []
    residuals = np.zeros(len(points))
    current = seed
    for i, p in enumerate(points):
        current, _, res = solve_ik(spec, current, p, settings)
        configs.append(current)
        residuals[i] = res
    return ConfigTrajectory(configs, residuals)

import numpy as np
import pytest

from tendonlfd.ik import (
    ConfigTrajectory,
    IkSettings,
    _dof_bounds,
    ik_step,
    plan_config_trajectory,
    solve_ik,
    tip_jacobian,
)
from tendonlfd.kinematics import clamp_config, config_vector, fk_tip, neutral_config

from conftest import random_config


def test_settings_validation():
    with pytest.raises(ValueError):
        IkSettings(damping=0.0)
    with pytest.raises(ValueError):
        IkSettings(tol=0.0)
    with pytest.raises(ValueError):
        IkSettings(max_iters=0)


def test_dof_bounds(eight_robot, anatomy_robot):
    lo, hi = _dof_bounds(eight_robot)
    assert len(lo) == eight_robot.dof_count
    assert np.all(lo == 0.0)
    assert hi[-1] == eight_robot.insertion_max
    lo, hi = _dof_bounds(anatomy_robot)
    assert lo[-1] == -np.pi and hi[-1] == np.pi


def test_jacobian_predicts_small_motion(eight_robot):
    """J dq matches the actual tip motion for a small interior step."""
    spec = eight_robot
    rng = np.random.default_rng(0)
    for _ in range(5):
        cfg = random_config(spec, rng)
        # keep probes interior so clamping does not bite
        cfg.tensions = np.clip(cfg.tensions, 0.5, 4.5)
        cfg.insertion = float(np.clip(cfg.insertion, 0.05, spec.insertion_max - 0.05))
        jac = tip_jacobian(spec, cfg, fk_steps=100)
        q = config_vector(spec, cfg)
        dq = rng.uniform(-1e-4, 1e-4, size=len(q))
        moved = clamp_config(spec, q + dq)
        actual = fk_tip(spec, moved, 100) - fk_tip(spec, cfg, 100)
        assert np.linalg.norm(jac @ dq - actual) < 1e-7


def test_ik_step_never_worse(eight_robot):
    spec = eight_robot
    settings = IkSettings(fk_steps=100)
    rng = np.random.default_rng(1)
    for _ in range(10):
        cfg = random_config(spec, rng)
        target = rng.uniform([-0.1, -0.1, 0.0], [0.1, 0.1, 0.25])  # may be unreachable
        before = np.linalg.norm(target - fk_tip(spec, cfg, 100))
        after_cfg = ik_step(spec, cfg, target, settings)
        after = np.linalg.norm(target - fk_tip(spec, after_cfg, 100))
        assert after <= before + 1e-12


def test_ik_step_at_target_is_identity(eight_robot):
    spec = eight_robot
    settings = IkSettings(fk_steps=100)
    cfg = neutral_config(spec)
    target = fk_tip(spec, cfg, 100)
    out = ik_step(spec, cfg, target, settings)
    assert np.array_equal(config_vector(spec, out), config_vector(spec, cfg))


def test_solve_ik_reaches_fk_targets(eight_robot):
    spec = eight_robot
    settings = IkSettings(fk_steps=100)
    rng = np.random.default_rng(2)
    for _ in range(10):
        target = fk_tip(spec, random_config(spec, rng), 100)
        _, tip, res = solve_ik(spec, neutral_config(spec), target, settings)
        assert res < settings.tol
        assert np.linalg.norm(target - tip) == pytest.approx(res, abs=1e-12)


def test_solve_ik_unreachable_reports_residual(eight_robot):
    spec = eight_robot
    settings = IkSettings(fk_steps=100, max_iters=40)
    target = np.array([0.0, 0.0, 0.5])  # beyond the 0.2 m reach
    cfg, tip, res = solve_ik(spec, neutral_config(spec), target, settings)
    assert res >= 0.5 - spec.length - 1e-6
    assert np.isfinite(res)


def test_solve_ik_deterministic(eight_robot):
    spec = eight_robot
    settings = IkSettings(fk_steps=100)
    target = np.array([0.03, 0.04, 0.15])
    a = solve_ik(spec, neutral_config(spec), target, settings)
    b = solve_ik(spec, neutral_config(spec), target, settings)
    assert np.array_equal(config_vector(spec, a[0]), config_vector(spec, b[0]))
    assert a[2] == b[2]


def test_plan_config_trajectory(eight_robot):
    spec = eight_robot
    settings = IkSettings(fk_steps=100)
    rng = np.random.default_rng(3)
    tips = np.array([fk_tip(spec, random_config(spec, rng), 100) for _ in range(4)])
    plan = plan_config_trajectory(spec, tips, neutral_config(spec), settings)
    assert isinstance(plan, ConfigTrajectory)
    assert len(plan) == 4
    assert np.all(plan.residuals < settings.tol)
    for cfg, target in zip(plan.waypoints, tips):
        assert np.linalg.norm(fk_tip(spec, cfg, 100) - target) < settings.tol


def test_plan_empty_trajectory(eight_robot):
    with pytest.raises(ValueError):
        plan_config_trajectory(eight_robot, np.zeros((0, 3)),
                               neutral_config(eight_robot))

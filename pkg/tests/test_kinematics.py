import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tendonlfd.errors import DimensionMismatch, EmptyShape, InvalidConfig
from tendonlfd.kinematics import (
    BackboneShape,
    Config,
    RobotSpec,
    TendonRouting,
    body_curvature,
    clamp_config,
    config_vector,
    fk_tip,
    forward_kinematics,
    neutral_config,
    routing_offset,
    tip_position,
    validate_config,
    wrap_angle,
)

from conftest import arc_tip, random_config, single_tendon_spec


# ---------------------------------------------------------------- wrap_angle

@given(st.floats(-100.0, 100.0))
def test_wrap_angle_range(b):
    w = wrap_angle(b)
    assert -math.pi <= w < math.pi


@given(st.floats(-10.0, 10.0), st.integers(-5, 5))
def test_wrap_angle_periodic(b, k):
    assert wrap_angle(b + 2.0 * math.pi * k) == pytest.approx(wrap_angle(b), abs=1e-9)


def test_wrap_angle_identity_inside():
    for b in (-math.pi, -1.0, 0.0, 1.0, 3.0):
        assert wrap_angle(b) == pytest.approx(b, abs=1e-12)


# ------------------------------------------------------------- construction

def test_routing_validation():
    with pytest.raises(ValueError):
        TendonRouting("curvy", 0.01, 0.0)
    with pytest.raises(ValueError):
        TendonRouting("straight", 0.0, 0.0)
    with pytest.raises(ValueError):
        TendonRouting("straight", 0.01, 0.0, revolutions=1.0)
    TendonRouting("helical", 0.01, 0.0, revolutions=1.0)  # fine


def test_spec_validation():
    t = (TendonRouting("straight", 0.01, 0.0),)
    with pytest.raises(ValueError):
        RobotSpec(-0.1, 0.01, 1e-3, 1e-3, t, (5.0,), 0.1)
    with pytest.raises(ValueError):
        RobotSpec(0.2, 0.01, 0.0, 1e-3, t, (5.0,), 0.1)
    with pytest.raises(ValueError):
        RobotSpec(0.2, 0.01, 1e-3, 1e-3, (), (), 0.1)
    with pytest.raises(ValueError):
        RobotSpec(0.2, 0.01, 1e-3, 1e-3, t, (5.0, 5.0), 0.1)
    with pytest.raises(ValueError):
        RobotSpec(0.2, 0.01, 1e-3, 1e-3, t, (-1.0,), 0.1)
    with pytest.raises(ValueError):
        RobotSpec(0.2, 0.01, 1e-3, 1e-3, t, (5.0,), 0.5)  # insertion > length
    with pytest.raises(ValueError):
        RobotSpec(0.2, 0.005, 1e-3, 1e-3, t, (5.0,), 0.1)  # offset > radius


def test_dof_count(eight_robot, anatomy_robot):
    assert eight_robot.dof_count == eight_robot.n_tendons + 1
    assert anatomy_robot.dof_count == anatomy_robot.n_tendons + 2


# -------------------------------------------------------- config validation

def test_validate_config_limits(eight_robot):
    spec = eight_robot
    validate_config(spec, neutral_config(spec))
    with pytest.raises(InvalidConfig):
        validate_config(spec, Config(np.zeros(spec.n_tendons - 1),
                                     spec.insertion_max, 0.0))
    bad = neutral_config(spec)
    bad.tensions[0] = -0.1
    with pytest.raises(InvalidConfig):
        validate_config(spec, bad)
    bad = neutral_config(spec)
    bad.tensions[0] = spec.tension_max[0] + 1.0
    with pytest.raises(InvalidConfig):
        validate_config(spec, bad)
    with pytest.raises(InvalidConfig):
        validate_config(spec, Config(np.zeros(spec.n_tendons),
                                     spec.insertion_max + 0.01, 0.0))
    with pytest.raises(InvalidConfig):
        validate_config(spec, Config(np.zeros(spec.n_tendons),
                                     spec.insertion_max, 0.5))  # rotation disabled
    nan = neutral_config(spec)
    nan.tensions[0] = float("nan")
    with pytest.raises(InvalidConfig):
        validate_config(spec, nan)


def test_validate_config_disabled_insertion():
    spec = single_tendon_spec()
    with pytest.raises(InvalidConfig):
        validate_config(spec, Config(np.zeros(1), 0.1, 0.0))
    validate_config(spec, Config(np.zeros(1), spec.insertion_max, 0.0))


def test_clamp_roundtrip_and_idempotence(anatomy_robot):
    spec = anatomy_robot
    rng = np.random.default_rng(0)
    for _ in range(50):
        raw = rng.uniform(-10.0, 10.0, size=spec.dof_count)
        cfg = clamp_config(spec, raw)
        validate_config(spec, cfg)
        again = clamp_config(spec, config_vector(spec, cfg))
        assert np.allclose(config_vector(spec, again), config_vector(spec, cfg),
                           atol=1e-12)


def test_clamp_config_shape_mismatch(eight_robot):
    with pytest.raises(DimensionMismatch):
        clamp_config(eight_robot, np.zeros(2))


def test_config_vector_order(anatomy_robot):
    cfg = Config(np.arange(1.0, 4.0), 0.1, 0.5)
    v = config_vector(anatomy_robot, cfg)
    assert np.allclose(v, [1.0, 2.0, 3.0, 0.1, 0.5])


# ----------------------------------------------------------- routing offset

def test_routing_offset_straight():
    r, rp = routing_offset(TendonRouting("straight", 0.01, 0.3), 0.07, 0.2)
    assert np.allclose(r, [0.01 * math.cos(0.3), 0.01 * math.sin(0.3), 0.0])
    assert np.allclose(rp, 0.0)


def test_routing_offset_helical_derivative():
    routing = TendonRouting("helical", 0.01, 0.5, revolutions=1.2)
    length = 0.2
    eps = 1e-7
    for s in (0.0, 0.05, 0.13):
        r, rp = routing_offset(routing, s, length)
        rm, _ = routing_offset(routing, s - eps, length)
        rpl, _ = routing_offset(routing, s + eps, length)
        fd = (rpl - rm) / (2.0 * eps)
        assert np.allclose(rp, fd, atol=1e-5)
        assert np.linalg.norm(r[:2]) == pytest.approx(0.01, abs=1e-12)


def test_body_curvature_matches_cross_product(eight_robot):
    spec = eight_robot
    rng = np.random.default_rng(1)
    cfg = random_config(spec, rng)
    s = 0.11
    acc = np.zeros(3)
    for routing, tau in zip(spec.tendons, cfg.tensions):
        r, rp = routing_offset(routing, s, spec.length)
        t = np.array([rp[0], rp[1], 1.0])
        t /= np.linalg.norm(t)
        acc += tau * np.cross(t, r)
    k = np.array([spec.bending_stiffness, spec.bending_stiffness,
                  spec.torsional_stiffness])
    assert np.allclose(body_curvature(spec, cfg, s), acc / k, atol=1e-12)


# --------------------------------------------------------------------- FK

def test_fk_constant_curvature_oracle():
    spec = single_tendon_spec()
    tau = 5.0
    kappa = tau * spec.tendons[0].offset_radius / spec.bending_stiffness
    tip = fk_tip(spec, Config(np.array([tau]), spec.length, 0.0), 200)
    assert np.linalg.norm(tip - arc_tip(kappa, spec.length)) < 1e-6


def test_fk_zero_tension_straight(eight_robot):
    shape = forward_kinematics(eight_robot, neutral_config(eight_robot), 100)
    assert np.max(np.abs(shape.positions[:, :2])) < 1e-12
    expected_z = np.linspace(0.0, eight_robot.insertion_max, 101)
    assert np.max(np.abs(shape.positions[:, 2] - expected_z)) < 1e-12
    for R in shape.orientations:
        assert np.allclose(R, np.eye(3), atol=1e-12)


def test_fk_orthonormal_frames(eight_robot):
    rng = np.random.default_rng(2)
    for _ in range(20):
        cfg = random_config(eight_robot, rng)
        shape = forward_kinematics(eight_robot, cfg, 100)
        for R in shape.orientations[:: 20]:
            assert np.max(np.abs(R @ R.T - np.eye(3))) < 1e-9
            assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-9)


def test_fk_rotation_equivariance(anatomy_robot):
    spec = anatomy_robot
    rng = np.random.default_rng(3)
    for _ in range(10):
        cfg = random_config(spec, rng)
        beta = cfg.rotation
        base = Config(cfg.tensions.copy(), cfg.insertion, 0.0)
        rz = np.array([[math.cos(beta), -math.sin(beta), 0.0],
                       [math.sin(beta), math.cos(beta), 0.0],
                       [0.0, 0.0, 1.0]])
        p_rot = forward_kinematics(spec, cfg, 100).positions
        p_base = forward_kinematics(spec, base, 100).positions
        assert np.max(np.abs(p_rot - p_base @ rz.T)) < 1e-9


def test_fk_insertion_is_proximal_segment(eight_robot):
    """The partially inserted rod is the proximal piece of the full shape."""
    spec = eight_robot
    cfg_full = Config(np.array([2.0, 0.5, 1.0, 0.3, 0.8]), spec.insertion_max, 0.0)
    full = forward_kinematics(spec, cfg_full, 200)
    half = Config(cfg_full.tensions.copy(), spec.insertion_max / 2.0, 0.0)
    tip = fk_tip(spec, half, 100)
    assert np.linalg.norm(tip - full.positions[100]) < 1e-9


def test_fk_helical_is_nonplanar(anatomy_robot):
    spec = anatomy_robot
    cfg = Config(np.array([0.0, 3.0, 0.0]), spec.insertion_max, 0.0)
    shape = forward_kinematics(spec, cfg, 100)
    spans = shape.positions.max(axis=0) - shape.positions.min(axis=0)
    assert spans[0] > 1e-4 and spans[1] > 1e-4  # bends out of any single plane


def test_fk_rejects_invalid_config(eight_robot):
    bad = neutral_config(eight_robot)
    bad.tensions[0] = -1.0
    with pytest.raises(InvalidConfig):
        forward_kinematics(eight_robot, bad)


def test_fk_shape_accessors(eight_robot):
    shape = forward_kinematics(eight_robot, neutral_config(eight_robot), 50)
    assert len(shape) == 51
    assert len(shape.frames) == 51
    assert np.allclose(tip_position(shape), shape.positions[-1])
    assert shape.arc_step == pytest.approx(eight_robot.insertion_max / 50)


def test_tip_position_empty():
    with pytest.raises(EmptyShape):
        tip_position(BackboneShape(np.zeros((0, 3)), np.zeros((0, 3, 3)), 0.1))


def test_fk_deterministic(eight_robot):
    cfg = Config(np.array([1.0, 2.0, 0.5, 0.1, 0.0]),
                 eight_robot.insertion_max, 0.0)
    a = forward_kinematics(eight_robot, cfg, 100).positions
    b = forward_kinematics(eight_robot, cfg, 100).positions
    assert np.array_equal(a, b)

import math

import numpy as np
import pytest

from tendonlfd import store
from tendonlfd.cli import resolve_asset
from tendonlfd.kinematics import Config, RobotSpec, TendonRouting


@pytest.fixture(scope="session")
def eight_robot():
    return store.load_robot(resolve_asset("robot_eight", "robots"))


@pytest.fixture(scope="session")
def anatomy_robot():
    return store.load_robot(resolve_asset("robot_anatomy", "robots"))


@pytest.fixture(scope="session")
def eight_task():
    return store.load_task(resolve_asset("eight", "tasks"))


@pytest.fixture(scope="session")
def sphere_task():
    return store.load_task(resolve_asset("double_sphere", "tasks"))


@pytest.fixture(scope="session")
def anatomy_task():
    return store.load_task(resolve_asset("anatomy", "tasks"))


def single_tendon_spec(ei: float = 4e-3, offset: float = 0.01,
                       length: float = 0.2) -> RobotSpec:
    """One straight tendon at phase 0: bends as a constant-curvature arc."""
    return RobotSpec(
        length=length, backbone_radius=offset,
        bending_stiffness=ei, torsional_stiffness=0.8 * ei,
        tendons=(TendonRouting("straight", offset, 0.0),),
        tension_max=(5.0,), insertion_max=length)


def arc_tip(kappa: float, length: float) -> np.ndarray:
    """Closed-form tip of a constant-curvature arc bending about +y.

    Curvature u = (0, kappa, 0) gives R(s) = Roty(kappa*s) and tangent
    (sin(kappa*s), 0, cos(kappa*s)).
    """
    if kappa == 0.0:
        return np.array([0.0, 0.0, length])
    return np.array([(1.0 - math.cos(kappa * length)) / kappa,
                     0.0,
                     math.sin(kappa * length) / kappa])


def random_config(spec: RobotSpec, rng: np.random.Generator) -> Config:
    tensions = rng.uniform(0.0, spec.tension_max_array())
    insertion = (rng.uniform(0.3, 1.0) * spec.insertion_max
                 if spec.insertion_enabled else spec.insertion_max)
    rotation = rng.uniform(-math.pi, math.pi) if spec.rotation_enabled else 0.0
    return Config(tensions, insertion, rotation)

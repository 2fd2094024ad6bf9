"""File formats: robot/task definition files, demonstration store, manifests.

Robot and task definitions are TOML; demonstrations live in an append-only
JSON-lines store (one record per line); run manifests are JSON documents
written next to the output they describe (<output>.manifest.json).
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ParseError, SchemaMismatch
from .kinematics import RobotSpec, TendonRouting
from .learning import ContextVector, TipTrajectory, TrainingSet
from .tasks import AnatomyParams, Demonstration, EightParams, SphereParams, TaskDef

TOOL_VERSION = "0.1.0"


def load_robot(path) -> RobotSpec:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        tendons = tuple(
            TendonRouting(t["kind"], t["offset_radius"], t["phase"],
                          t.get("revolutions", 0.0))
            for t in doc["tendons"])
        tmax = doc["tension_max"]
        if not isinstance(tmax, list):
            tmax = [tmax] * len(tendons)
        return RobotSpec(
            length=doc["length"],
            backbone_radius=doc["backbone_radius"],
            bending_stiffness=doc["bending_stiffness"],
            torsional_stiffness=doc["torsional_stiffness"],
            tendons=tendons,
            tension_max=tuple(tmax),
            insertion_max=doc["insertion_max"],
            insertion_enabled=doc.get("insertion_enabled", False),
            rotation_enabled=doc.get("rotation_enabled", False),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad robot spec: {exc}") from exc


def load_task(path) -> TaskDef:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        variant = doc["variant"]
        if variant == "eight_plane":
            e = doc["eight"]
            return TaskDef(variant, eight=EightParams(
                np.array(e["p_ref_min"]), np.array(e["p_ref_max"]),
                tuple(e["w_range"]), tuple(e["h_range"])))
        if variant == "double_sphere":
            s = doc["sphere"]
            return TaskDef(variant, sphere=SphereParams(
                np.array(s["p_ref_min"]), np.array(s["p_ref_max"]),
                tuple(s["radius_range"])))
        if variant == "anatomy":
            a = doc["anatomy"]
            mesh_path = a["mesh_path"]
            if not Path(mesh_path).is_absolute():
                mesh_path = str((path.parent / mesh_path).resolve())
            return TaskDef(variant, anatomy=AnatomyParams(
                mesh_path, np.array(a["nominal_p_ref"]),
                a.get("perturbation", 0.01),
                tuple(a.get("scale_range", (0.5, 1.5)))))
        raise ValueError(f"unknown variant {variant!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad task definition: {exc}") from exc


def demo_to_record(demo: Demonstration) -> dict:
    return {
        "task": demo.context.schema,
        "context": demo.context.values.tolist(),
        "waypoints": demo.trajectory.waypoints.tolist(),
        "meta": demo.meta,
    }


def record_to_demo(rec: dict) -> Demonstration:
    return Demonstration(
        ContextVector(np.array(rec["context"]), rec["task"]),
        TipTrajectory(np.array(rec["waypoints"])),
        rec.get("meta", {}))


def append_demos(path, demos) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a") as f:
        for demo in demos:
            f.write(json.dumps(demo_to_record(demo)) + "\n")


def load_demos(path) -> list[Demonstration]:
    path = Path(path)
    demos = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                demos.append(record_to_demo(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ParseError(f"{path}:{lineno}: bad record: {exc}") from exc
    return demos


def demos_to_training_set(demos) -> TrainingSet:
    demos = list(demos)
    if not demos:
        raise SchemaMismatch("empty demonstration store")
    return TrainingSet([d.context for d in demos], [d.trajectory for d in demos])


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(output_path, command: str, params: dict, inputs: list,
                   seed=None) -> Path:
    """Record how an output file was produced; written as <output>.manifest.json."""
    manifest = {
        "command": command,
        "parameters": params,
        "inputs": {str(p): file_digest(p) for p in inputs},
        "output": str(output_path),
        "output_digest": file_digest(output_path),
        "seed": seed,
        "tool_version": TOOL_VERSION,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path = Path(str(output_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path

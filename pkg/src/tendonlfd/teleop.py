"""WebSocket session server for interactive demonstration collection.

One session per connection. The client streams tip targets; the server runs
a bounded incremental IK refinement per message and replies with the robot
state (decimated backbone, tip, config, residual). Recording captures the
achieved tips, never the raw targets; saving resamples the buffer to M
waypoints and appends a demonstration record to the store.

Wire protocol (JSON text frames, all values SI):
  client -> server:
    {"type": "init", "task": ..., "robot": ...}
    {"type": "context", "values": [...]}
    {"type": "target", "p": [x, y, z]}
    {"type": "record", "action": "start" | "stop" | "save"}
    {"type": "playback", "model": path, "context": [...], "cadence": s}
    {"type": "reset"}
  server -> client:
    {"type": "env", "version": 1, "descriptor": {...}}
    {"type": "state", "backbone": [[x,y,z]...], "tip": [...],
     "config": {...}, "residual": r, "recording": bool}
    {"type": "saved", "index": n}
    {"type": "error", "code": ..., "msg": ...}
"""

from __future__ import annotations

import asyncio
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import learning, store
from .errors import SchemaMismatch, TendonLfdError
from .ik import IkSettings, ik_step, plan_config_trajectory
from .kinematics import Config, RobotSpec, fk_tip, forward_kinematics, neutral_config
from .learning import SCHEMA_DIMS, ContextVector
from .mesh import Mesh, load_mesh
from .tasks import TaskDef, sample_context, sphere_centers

PROTOCOL_VERSION = 1
WAYPOINTS = 50  # M: saved demonstrations are resampled to this many points
MAX_BACKBONE_POINTS = 64
IK_STEPS_PER_TARGET = 5  # latency budget; offline execution uses full IK

_session_ids = itertools.count(1)


@dataclass
class Session:
    spec: RobotSpec
    task: TaskDef
    mesh: Mesh | None
    store_path: Path
    config: Config = None
    context: ContextVector | None = None
    recording: bool = False
    buffer: list = field(default_factory=list)
    session_id: int = 0
    ik: IkSettings = field(default_factory=lambda: IkSettings(fk_steps=100))

    def __post_init__(self):
        if self.config is None:
            self.config = neutral_config(self.spec)
        if self.session_id == 0:
            self.session_id = next(_session_ids)


def _error(code: str, msg: str) -> dict:
    return {"type": "error", "code": code, "msg": msg}


def _context_from_values(values, schema: str) -> ContextVector:
    """Build a schema context; the trailing bias 1 may be omitted on the wire."""
    values = [float(v) for v in values]
    if len(values) == SCHEMA_DIMS[schema] - 1:
        values.append(1.0)
    return ContextVector(np.array(values), schema)


def env_descriptor(session: Session) -> dict:
    """Task environment geometry for the client scene.

    Context-dependent geometry (sphere placement, mesh scaling) uses the
    session context when one is set, else a deterministic nominal context.
    """
    task = session.task
    context = session.context
    if context is None:
        context = sample_context(task, np.random.default_rng(0))
    d = {"schema": task.variant, "context_dim": SCHEMA_DIMS[task.variant],
         "waypoints": WAYPOINTS}
    if task.variant == "eight_plane":
        p = task.eight
        lo = np.minimum(p.p_ref_min, p.p_ref_max)
        hi = np.maximum(p.p_ref_min, p.p_ref_max)
        margin = 2.0 * max(p.w_range[1], p.h_range[1])
        d.update(kind="plane", normal=[0.0, 1.0, 0.0],
                 point=((lo + hi) / 2.0).tolist(),
                 x_range=[lo[0] - margin, hi[0] + margin],
                 z_range=[lo[2] - margin, hi[2] + margin])
    elif task.variant == "double_sphere":
        c1, c2 = sphere_centers(context)
        r1, r2 = context.values[3], context.values[4]
        d.update(kind="spheres", spheres=[
            {"center": c1.tolist(), "radius": float(r1)},
            {"center": c2.tolist(), "radius": float(r2)}])
    else:
        placed = session.mesh.transformed(
            context.values[3], session.mesh.centroid, context.values[:3])
        d.update(kind="mesh", vertices=placed.vertices.tolist(),
                 triangles=placed.triangles.tolist())
    return d


def _env_message(session: Session, extra: dict | None = None) -> dict:
    descriptor = env_descriptor(session)
    if extra:
        descriptor.update(extra)
    return {"type": "env", "version": PROTOCOL_VERSION, "descriptor": descriptor}


def _state_message(session: Session, config: Config | None = None,
                   residual: float = 0.0) -> dict:
    if config is None:
        config = session.config
    shape = forward_kinematics(session.spec, config, session.ik.fk_steps)
    pts = shape.positions
    if len(pts) > MAX_BACKBONE_POINTS:
        idx = np.linspace(0, len(pts) - 1, MAX_BACKBONE_POINTS).round().astype(int)
        pts = pts[idx]
    return {"type": "state",
            "backbone": pts.tolist(),
            "tip": pts[-1].tolist(),
            "config": {"tensions": config.tensions.tolist(),
                       "insertion": float(config.insertion),
                       "rotation": float(config.rotation)},
            "residual": float(residual),
            "recording": session.recording}


def handle_target(session: Session, p) -> dict:
    """Bounded IK refinement toward p; appends the achieved tip if recording."""
    target = np.asarray([float(v) for v in p], dtype=float)
    if target.shape != (3,) or not np.all(np.isfinite(target)):
        raise ValueError("target p must be 3 finite numbers")
    config = session.config
    tip = fk_tip(session.spec, config, session.ik.fk_steps)
    residual = float(np.linalg.norm(target - tip))
    for _ in range(IK_STEPS_PER_TARGET):
        if residual < session.ik.tol:
            break
        config = ik_step(session.spec, config, target, session.ik)
        tip = fk_tip(session.spec, config, session.ik.fk_steps)
        residual = float(np.linalg.norm(target - tip))
    session.config = config
    if session.recording:
        session.buffer.append(tip.copy())
    return _state_message(session, config, residual)


def handle_record(session: Session, action: str):
    if action == "start":
        session.buffer = []
        session.recording = True
        return [(0.0, _state_message(session))]
    if action == "stop":
        session.recording = False
        return [(0.0, _state_message(session))]
    if action == "save":
        if session.recording:
            return [(0.0, _error("recording_active", "stop recording before saving"))]
        if len(session.buffer) < 2:
            return [(0.0, _error("empty_recording",
                                 "need at least 2 recorded waypoints"))]
        if session.context is None:
            return [(0.0, _error("incomplete_context",
                                 "set a context before saving"))]
        from .metrics import resample_arclength
        from .tasks import Demonstration

        resampled = resample_arclength(np.array(session.buffer), WAYPOINTS)
        demo = Demonstration(
            session.context, learning.TipTrajectory(resampled),
            {"task": session.task.variant, "source": "teleop",
             "session": session.session_id})
        index = _append_record(session.store_path, demo)
        session.buffer = []
        return [(0.0, {"type": "saved", "index": index})]
    return [(0.0, _error("bad_message", f"unknown record action {action!r}"))]


def _append_record(path: Path, demo) -> int:
    n_before = 0
    if path.exists():
        with open(path) as f:
            n_before = sum(1 for line in f if line.strip())
    store.append_demos(path, [demo])
    return n_before + 1


def handle_playback(session: Session, model_path: str, values, cadence: float):
    """Predict, plan via IK, stream M states; cadence 0 = burst."""
    try:
        model = learning.load_model(model_path)
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        return [(0.0, _error("bad_model", f"cannot load model: {exc}"))]
    if model.schema != session.task.variant:
        return [(0.0, _error("schema_mismatch",
                             f"model schema {model.schema!r} does not match "
                             f"task {session.task.variant!r}"))]
    try:
        context = _context_from_values(values, model.schema)
    except (TypeError, ValueError, TendonLfdError) as exc:
        return [(0.0, _error("bad_context", str(exc)))]

    predicted = learning.predict(model, context)
    plan = plan_config_trajectory(session.spec, predicted, session.config, session.ik)
    replies = [(0.0, _env_message(session,
                                  {"predicted": predicted.waypoints.tolist()}))]
    for config, residual in zip(plan.waypoints, plan.residuals):
        replies.append((cadence, _state_message(session, config, residual)))
    session.config = plan.waypoints[-1]
    return replies


def handle_message(session: Session, raw: str):
    """Process one inbound frame; returns [(delay_s, reply_payload), ...].

    Never raises on malformed input: the session survives and the client
    gets an error frame.
    """
    try:
        msg = json.loads(raw)
        if not isinstance(msg, dict):
            raise ValueError("frame must be a JSON object")
        mtype = msg["type"]
    except (json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        return [(0.0, _error("bad_message", f"malformed frame: {exc}"))]

    try:
        if mtype == "init":
            return [(0.0, _env_message(session)), (0.0, _state_message(session))]
        if mtype == "context":
            session.context = _context_from_values(msg["values"], session.task.variant)
            return [(0.0, _env_message(session))]
        if mtype == "target":
            return [(0.0, handle_target(session, msg["p"]))]
        if mtype == "record":
            return handle_record(session, msg["action"])
        if mtype == "playback":
            return handle_playback(session, msg["model"],
                                   msg.get("context", []),
                                   float(msg.get("cadence", 0.0)))
        if mtype == "reset":
            session.config = neutral_config(session.spec)
            session.buffer = []
            session.recording = False
            return [(0.0, _state_message(session))]
        return [(0.0, _error("bad_message", f"unknown message type {mtype!r}"))]
    except SchemaMismatch as exc:
        return [(0.0, _error("schema_mismatch", str(exc)))]
    except (KeyError, TypeError, ValueError, TendonLfdError) as exc:
        return [(0.0, _error("bad_message", str(exc)))]


def create_app(spec: RobotSpec, task: TaskDef, demos_out):
    """FastAPI app exposing the session protocol at /ws."""
    mesh = load_mesh(task.anatomy.mesh_path) if task.variant == "anatomy" else None
    app = FastAPI(title="tendonlfd teleop")
    store_path = Path(demos_out)
    lock = asyncio.Lock()

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        session = Session(spec, task, mesh, store_path)
        try:
            while True:
                raw = await websocket.receive_text()
                async with lock:  # store writes and state are session-serial
                    replies = handle_message(session, raw)
                for delay, payload in replies:
                    if delay > 0:
                        await asyncio.sleep(delay)
                    await websocket.send_text(json.dumps(payload))
        except WebSocketDisconnect:
            pass

    return app

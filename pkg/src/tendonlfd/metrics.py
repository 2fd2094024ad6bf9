"""Trajectory resampling, discrete Frechet distance and evaluation reports."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, EmptyInput

# divisor applied per axis when mapping an eight-task curve into the
# reference context: x scaled by w*40, y untouched, z scaled by h*40
REFERENCE_SCALE = 40.0


def _points(traj) -> np.ndarray:
    return np.asarray(getattr(traj, "waypoints", traj), dtype=float)


def resample_arclength(points, m: int) -> np.ndarray:
    """Resample a polyline to m points at equal arc-length spacing.

    Endpoints are preserved exactly.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2 or m < 2:
        raise DegenerateInput("need at least 2 points and m >= 2")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0.0:
        raise DegenerateInput("polyline has zero length")
    targets = np.linspace(0.0, total, m)
    out = np.empty((m, 3))
    out[0] = pts[0]
    out[-1] = pts[-1]
    idx = np.searchsorted(cum, targets[1:-1], side="right") - 1
    idx = np.clip(idx, 0, len(seg) - 1)
    frac = (targets[1:-1] - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1.0)
    out[1:-1] = pts[idx] + frac[:, None] * (pts[idx + 1] - pts[idx])
    return out


def frechet_distance(a, b) -> float:
    """Discrete Frechet distance between two curves (Euclidean point metric)."""
    pa = _points(a)
    pb = _points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyInput("empty curve")
    # pairwise distances, then the standard DP over the coupling table
    dist = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
    n, m = dist.shape
    ca = np.empty((n, m))
    ca[0, 0] = dist[0, 0]
    for j in range(1, m):
        ca[0, j] = max(ca[0, j - 1], dist[0, j])
    for i in range(1, n):
        ca[i, 0] = max(ca[i - 1, 0], dist[i, 0])
        row = ca[i]
        prev = ca[i - 1]
        for j in range(1, m):
            row[j] = max(min(prev[j], prev[j - 1], row[j - 1]), dist[i, j])
    return float(ca[-1, -1])


def to_reference_context(traj, context) -> np.ndarray:
    """Rescale an eight-task curve into the common reference context.

    Displacements from p_ref are divided elementwise by (w*40, 1, h*40), so
    curves traced at different widths/heights collapse onto one scale.
    """
    values = np.asarray(getattr(context, "values", context), dtype=float)
    p_ref = values[:3]
    w, h = values[3], values[4]
    divisor = np.array([w * REFERENCE_SCALE, 1.0, h * REFERENCE_SCALE])
    pts = _points(traj)
    return p_ref + (pts - p_ref) / divisor


def reference_curve(demos) -> np.ndarray:
    """Average reference-scaled displacement curve of eight-task demonstrations.

    Each demo is mapped into the reference context, expressed as waypoint
    displacements from its own p_ref, and the displacements are averaged
    indexwise. The result is anchored at the origin.
    """
    demos = list(demos)
    if not demos:
        raise EmptyInput("no demonstrations")
    acc = None
    for demo in demos:
        values = np.asarray(demo.context.values, dtype=float)
        disp = to_reference_context(demo.trajectory, demo.context) - values[:3]
        acc = disp if acc is None else acc + disp
    return acc / len(demos)


@dataclass
class EvaluationReport:
    distances: np.ndarray  # m, per case
    contexts: list
    model_id: str
    ik_residuals: np.ndarray  # m, mean IK residual per case

    @property
    def mean(self) -> float:
        return float(np.mean(self.distances))

    @property
    def std(self) -> float:
        return float(np.std(self.distances))

    def to_csv(self) -> str:
        lines = []
        k = len(np.asarray(getattr(self.contexts[0], "values", self.contexts[0])))
        header = [f"context_{i}" for i in range(k)] + ["frechet_m", "mean_ik_residual_m"]
        lines.append(",".join(header))
        for ctx, dist, res in zip(self.contexts, self.distances, self.ik_residuals):
            vals = np.asarray(getattr(ctx, "values", ctx), dtype=float)
            lines.append(",".join([repr(v) for v in vals] + [repr(float(dist)), repr(float(res))]))
        lines.append(",".join(["summary"] + [""] * (k - 1)
                              + [repr(self.mean), repr(self.std)]))
        return "\n".join(lines) + "\n"


def evaluate_model(model, cases, spec, ik_settings, mode: str,
                   reference=None, fk_steps: int = 200,
                   model_id: str = "") -> EvaluationReport:
    """Predict, execute via IK on the robot, and score with Frechet distance.

    mode "vs_reference": the executed tip curve is mapped into the eight
    task's reference context and compared (as a displacement curve) against
    the reference curve. mode "vs_demo": compared directly against the
    held-out ground-truth trajectory of each case.
    """
    from .ik import plan_config_trajectory
    from .kinematics import fk_tip, neutral_config
    from .learning import predict

    cases = list(cases)
    if not cases:
        raise EmptyInput("no evaluation cases")
    if mode not in ("vs_reference", "vs_demo"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "vs_reference" and reference is None:
        raise ValueError("vs_reference mode needs a reference curve")

    distances = np.zeros(len(cases))
    residual_means = np.zeros(len(cases))
    contexts = []
    for i, case in enumerate(cases):
        context, truth = case if isinstance(case, tuple) else (case, None)
        contexts.append(context)
        predicted = predict(model, context)
        plan = plan_config_trajectory(spec, predicted, neutral_config(spec), ik_settings)
        achieved = np.array([fk_tip(spec, c, fk_steps) for c in plan.waypoints])
        residual_means[i] = float(np.mean(plan.residuals))
        if mode == "vs_reference":
            p_ref = np.asarray(context.values, dtype=float)[:3]
            disp = to_reference_context(achieved, context) - p_ref
            distances[i] = frechet_distance(disp, reference)
        else:
            if truth is None:
                raise ValueError("vs_demo mode needs (context, ground truth) cases")
            distances[i] = frechet_distance(achieved, truth)
    return EvaluationReport(distances, contexts, model_id, residual_means)

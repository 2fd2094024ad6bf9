"""Context-to-trajectory models: linear ridge, RBF kernel ridge, trajectory net.

All three map a context vector (augmented with a trailing 1) to a workspace
trajectory flattened as a 3M vector. The ridge models consume raw contexts;
the network standardizes inputs and outputs by training-set statistics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DegenerateData, DimensionMismatch, SchemaMismatch, SingularSystem

SCHEMA_DIMS = {
    "eight_plane": 6,  # p_ref (3), w, h, 1
    "double_sphere": 6,  # p_ref (3), r1, r2, 1
    "anatomy": 5,  # p_ref (3), s, 1
}


@dataclass(frozen=True)
class ContextVector:
    values: np.ndarray
    schema: str

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.schema not in SCHEMA_DIMS:
            raise SchemaMismatch(f"unknown schema {self.schema!r}")
        k = SCHEMA_DIMS[self.schema]
        if self.values.shape != (k,):
            raise DimensionMismatch(f"schema {self.schema} needs {k} values")
        if self.values[-1] != 1.0:
            raise ValueError("context must end with the bias element 1")


@dataclass
class TipTrajectory:
    waypoints: np.ndarray  # (M, 3)

    def __post_init__(self):
        self.waypoints = np.asarray(self.waypoints, dtype=float)
        if self.waypoints.ndim != 2 or self.waypoints.shape[1] != 3:
            raise DimensionMismatch("waypoints must be (M, 3)")
        if len(self.waypoints) < 2:
            raise ValueError("trajectory needs at least 2 waypoints")
        if not np.all(np.isfinite(self.waypoints)):
            raise ValueError("non-finite waypoint")

    def __len__(self) -> int:
        return len(self.waypoints)


def flatten(traj: TipTrajectory) -> np.ndarray:
    """Row-major flattening (x1, y1, z1, ..., xM, yM, zM)."""
    return _points(traj).reshape(-1)


def unflatten(v: np.ndarray, m: int) -> TipTrajectory:
    v = np.asarray(v, dtype=float)
    if v.shape != (3 * m,):
        raise DimensionMismatch(f"expected length {3 * m}, got {v.shape}")
    return TipTrajectory(v.reshape(m, 3))


def _points(traj) -> np.ndarray:
    return np.asarray(getattr(traj, "waypoints", traj), dtype=float)


@dataclass
class TrainingSet:
    contexts: list[ContextVector]
    trajectories: list[TipTrajectory]

    def __post_init__(self):
        if len(self.contexts) == 0 or len(self.contexts) != len(self.trajectories):
            raise ValueError("need >= 1 (context, trajectory) pair, equal counts")
        schema = self.contexts[0].schema
        m = len(self.trajectories[0])
        if any(c.schema != schema for c in self.contexts):
            raise SchemaMismatch("mixed context schemas")
        if any(len(t) != m for t in self.trajectories):
            raise DimensionMismatch("mixed trajectory lengths")

    @property
    def schema(self) -> str:
        return self.contexts[0].schema

    @property
    def m(self) -> int:
        return len(self.trajectories[0])

    def __len__(self) -> int:
        return len(self.contexts)

    def design_matrices(self):
        x = np.stack([c.values for c in self.contexts])
        y = np.stack([flatten(t) for t in self.trajectories])
        return x, y


@dataclass
class LinearRidgeModel:
    weights: np.ndarray  # (k, 3M)
    alpha: float
    schema: str
    m: int


@dataclass
class KernelRidgeModel:
    centers: np.ndarray  # (Dk, k)
    dual_weights: np.ndarray  # (Dk, 3M)
    gamma: float
    alpha: float
    schema: str
    m: int


@dataclass
class TrajectoryNetModel:
    """ReLU net with an input-to-output linear shortcut.

    The output layer is affine in the last hidden activation and the
    (normalized) input; the shortcut carries the affine trend of the map so
    the hidden stack only has to model the nonlinear residual.
    """

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    skip: np.ndarray  # (k, 3M) input-to-output shortcut
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: np.ndarray
    y_std: np.ndarray
    seed: int
    schema: str
    m: int
    final_loss: float = float("nan")


def train_linear_ridge(data: TrainingSet, alpha: float) -> LinearRidgeModel:
    """Ridge solution W = (X^T X + alpha I)^-1 X^T Y via a symmetric solve."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    x, y = data.design_matrices()
    k = x.shape[1]
    a = x.T @ x + alpha * np.eye(k)
    try:
        w = scipy.linalg.solve(a, x.T @ y, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularSystem("X^T X is rank-deficient and alpha = 0") from exc
    if not np.all(np.isfinite(w)):
        raise SingularSystem("non-finite ridge solution")
    return LinearRidgeModel(w, alpha, data.schema, data.m)


def rbf_kernel(a, b, gamma: float) -> float:
    """exp(-gamma * ||a - b||^2)."""
    va = np.asarray(getattr(a, "values", a), dtype=float)
    vb = np.asarray(getattr(b, "values", b), dtype=float)
    if va.shape != vb.shape:
        raise DimensionMismatch("kernel arguments differ in dimension")
    d = va - vb
    return float(np.exp(-gamma * np.dot(d, d)))


def _gram(xa: np.ndarray, xb: np.ndarray, gamma: float) -> np.ndarray:
    sq = np.sum((xa[:, None, :] - xb[None, :, :]) ** 2, axis=2)
    return np.exp(-gamma * sq)


def train_kernel_ridge(data: TrainingSet, alpha: float, gamma: float) -> KernelRidgeModel:
    """Kernel ridge with one center per training context (Dk = D)."""
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    x, y = data.design_matrices()
    g = _gram(x, x, gamma) + alpha * np.eye(len(x))
    try:
        dual = scipy.linalg.solve(g, y, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularSystem("Gram matrix singular (increase alpha)") from exc
    if not np.all(np.isfinite(dual)):
        raise SingularSystem("non-finite kernel ridge solution")
    return KernelRidgeModel(x.copy(), dual, gamma, alpha, data.schema, data.m)


def net_init(layer_sizes, seed: int):
    """He-style fan-in initialization; the shortcut starts at zero."""
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / n_in), size=(n_in, n_out)))
        biases.append(np.zeros(n_out))
    skip = np.zeros((layer_sizes[0], layer_sizes[-1]))
    return weights, biases, skip


def net_forward(weights, biases, skip, x: np.ndarray) -> np.ndarray:
    a = x
    for w, b in zip(weights[:-1], biases[:-1]):
        a = np.maximum(a @ w + b, 0.0)
    return a @ weights[-1] + biases[-1] + x @ skip


def net_loss_and_grad(weights, biases, skip, x: np.ndarray, y: np.ndarray):
    """MSE loss (averaged over all D*3M outputs) and its analytic gradients."""
    activations = [x]
    a = x
    for w, b in zip(weights[:-1], biases[:-1]):
        a = np.maximum(a @ w + b, 0.0)
        activations.append(a)
    out = a @ weights[-1] + biases[-1] + x @ skip
    diff = out - y
    n = y.size
    loss = float(np.sum(diff * diff) / n)

    grad_w = [None] * len(weights)
    grad_b = [None] * len(biases)
    delta = 2.0 * diff / n
    grad_skip = x.T @ delta
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = activations[layer].T @ delta
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[layer].T) * (activations[layer] > 0)
    return loss, grad_w, grad_b, grad_skip


@dataclass
class NetHyper:
    learning_rate: float = 1e-3
    epochs: int = 5000
    batch_size: int = 0  # 0 = full batch
    seed: int = 0
    weight_decay: float = 0.0  # decoupled L2 on the hidden-stack weights


def train_trajectory_net(data: TrainingSet, layer_sizes,
                         hyper: NetHyper | None = None) -> TrajectoryNetModel:
    """Adam-trained ReLU network on standardized inputs and outputs."""
    if hyper is None:
        hyper = NetHyper()
    x, y = data.design_matrices()
    layer_sizes = list(layer_sizes)
    if layer_sizes[0] != x.shape[1] or layer_sizes[-1] != y.shape[1]:
        raise DimensionMismatch(
            f"layer_sizes must start at {x.shape[1]} and end at {y.shape[1]}")
    if len(x) == 0:
        raise DegenerateData("empty training set")

    x_mean = x.mean(axis=0)
    x_std = x.std(axis=0)
    y_mean = y.mean(axis=0)
    y_std = y.std(axis=0)
    # constant dimensions (e.g. the bias element) carry no signal; std 1
    x_std = np.where(x_std > 0, x_std, 1.0)
    y_std = np.where(y_std > 0, y_std, 1.0)
    xn = (x - x_mean) / x_std
    yn = (y - y_mean) / y_std

    weights, biases, skip = net_init(layer_sizes, hyper.seed)
    params = weights + biases + [skip]
    m1 = [np.zeros_like(p) for p in params]
    m2 = [np.zeros_like(p) for p in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    rng = np.random.default_rng(hyper.seed)

    d = len(xn)
    batch = hyper.batch_size if 0 < hyper.batch_size < d else 0
    loss = float("nan")
    step = 0
    for epoch in range(hyper.epochs):
        if batch:
            order = rng.permutation(d)
            slices = [order[i:i + batch] for i in range(0, d, batch)]
        else:
            slices = [slice(None)]
        for sl in slices:
            loss, grad_w, grad_b, grad_s = net_loss_and_grad(
                weights, biases, skip, xn[sl], yn[sl])
            grads = grad_w + grad_b + [grad_s]
            step += 1
            for idx, (p, g, a1, a2) in enumerate(zip(params, grads, m1, m2)):
                a1 *= beta1
                a1 += (1 - beta1) * g
                a2 *= beta2
                a2 += (1 - beta2) * g * g
                mh = a1 / (1 - beta1 ** step)
                vh = a2 / (1 - beta2 ** step)
                p -= hyper.learning_rate * mh / (np.sqrt(vh) + eps)
                # decay tames the hidden stack only; the shortcut and the
                # biases carry the affine trend and stay unpenalized
                if hyper.weight_decay > 0.0 and idx < len(weights):
                    p -= hyper.learning_rate * hyper.weight_decay * p

    final_loss, _, _, _ = net_loss_and_grad(weights, biases, skip, xn, yn)
    return TrajectoryNetModel(layer_sizes, weights, biases, skip,
                              x_mean, x_std, y_mean, y_std,
                              hyper.seed, data.schema, data.m, final_loss)


def predict(model, context: ContextVector) -> TipTrajectory:
    """Map a context through any of the three trained models."""
    if context.schema != model.schema:
        raise SchemaMismatch(
            f"model schema {model.schema!r} != context schema {context.schema!r}")
    kappa = context.values
    if isinstance(model, LinearRidgeModel):
        return unflatten(kappa @ model.weights, model.m)
    if isinstance(model, KernelRidgeModel):
        phi = _gram(kappa[None, :], model.centers, model.gamma)[0]
        return unflatten(phi @ model.dual_weights, model.m)
    if isinstance(model, TrajectoryNetModel):
        xn = (kappa - model.x_mean) / model.x_std
        out = net_forward(model.weights, model.biases, model.skip, xn[None, :])[0]
        return unflatten(out * model.y_std + model.y_mean, model.m)
    raise TypeError(f"unknown model type {type(model).__name__}")


def grid_search(data: TrainingSet, family: str, grid, eval_contexts, scorer):
    """Train one model per grid point and rank by the mean score.

    scorer(model, context) returns the per-context score (mean Frechet
    distance in the pipeline). Ties break toward the earlier grid entry.
    Returns (best_params, table) with table rows (params, score).
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    table = []
    best = None
    for params in grid:
        model = train_family(data, family, params)
        score = float(np.mean([scorer(model, ctx) for ctx in eval_contexts]))
        table.append((params, score))
        if best is None or score < best[1]:
            best = (params, score)
    return best[0], table


def train_family(data: TrainingSet, family: str, params: dict):
    """Dispatch training by family name ("linear", "rbf", "net")."""
    if family == "linear":
        return train_linear_ridge(data, alpha=params["alpha"])
    if family == "rbf":
        return train_kernel_ridge(data, alpha=params["alpha"], gamma=params["gamma"])
    if family == "net":
        depth, width = params.get("hidden", (2, 128))
        layers = [SCHEMA_DIMS[data.schema]] + [width] * depth + [3 * data.m]
        hyper = NetHyper(
            learning_rate=params.get("learning_rate", 1e-3),
            epochs=params.get("epochs", 5000),
            batch_size=params.get("batch_size", 0),
            seed=params.get("seed", 0),
            weight_decay=params.get("weight_decay", 0.0),
        )
        return train_trajectory_net(data, layers, hyper)
    raise ValueError(f"unknown model family {family!r}")


def save_model(model, path) -> None:
    """Write a model as a JSON document; round-trips bit-identically."""
    doc = {"m": model.m, "schema": model.schema}
    if isinstance(model, LinearRidgeModel):
        doc.update(family="linear", alpha=model.alpha, weights=model.weights.tolist())
    elif isinstance(model, KernelRidgeModel):
        doc.update(family="rbf", alpha=model.alpha, gamma=model.gamma,
                   centers=model.centers.tolist(),
                   dual_weights=model.dual_weights.tolist())
    elif isinstance(model, TrajectoryNetModel):
        doc.update(family="net", layer_sizes=model.layer_sizes,
                   weights=[w.tolist() for w in model.weights],
                   biases=[b.tolist() for b in model.biases],
                   skip=model.skip.tolist(),
                   norm={"x_mean": model.x_mean.tolist(), "x_std": model.x_std.tolist(),
                         "y_mean": model.y_mean.tolist(), "y_std": model.y_std.tolist()},
                   seed=model.seed, final_loss=model.final_loss)
    else:
        raise TypeError(f"unknown model type {type(model).__name__}")
    with open(path, "w") as f:
        json.dump(doc, f)


def load_model(path):
    with open(path) as f:
        doc = json.load(f)
    family = doc["family"]
    if family == "linear":
        return LinearRidgeModel(np.array(doc["weights"]), doc["alpha"],
                                doc["schema"], doc["m"])
    if family == "rbf":
        return KernelRidgeModel(np.array(doc["centers"]), np.array(doc["dual_weights"]),
                                doc["gamma"], doc["alpha"], doc["schema"], doc["m"])
    if family == "net":
        norm = doc["norm"]
        return TrajectoryNetModel(
            doc["layer_sizes"],
            [np.array(w) for w in doc["weights"]],
            [np.array(b) for b in doc["biases"]],
            np.array(doc["skip"]),
            np.array(norm["x_mean"]), np.array(norm["x_std"]),
            np.array(norm["y_mean"]), np.array(norm["y_std"]),
            doc["seed"], doc["schema"], doc["m"], doc.get("final_loss", float("nan")))
    raise ValueError(f"unknown model family {family!r}")

"""Command-line pipeline: demo generation, training, evaluation, execution, teleop.

Exit codes: 2 bad arguments, 3 file errors, 4 generation failure,
5 training failure, 6 schema mismatch, 7 bind failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import learning, metrics, store, tasks
from .errors import ParseError, SchemaMismatch, SingularSystem, TendonLfdError
from .ik import IkSettings, plan_config_trajectory
from .kinematics import config_vector, fk_tip, neutral_config
from .learning import ContextVector, NetHyper, SCHEMA_DIMS
from .mesh import load_mesh

EXIT_BAD_ARGS = 2
EXIT_FILE_ERROR = 3
EXIT_GENERATION = 4
EXIT_TRAINING = 5
EXIT_SCHEMA = 6
EXIT_BIND = 7

ASSET_ENV = "TENDONLFD_ASSETS"


def asset_dirs() -> list[Path]:
    dirs = []
    env = os.environ.get(ASSET_ENV)
    if env:
        dirs.extend(Path(p) for p in env.split(os.pathsep) if p)
    dirs.append(Path(__file__).parent / "assets")
    return dirs


def resolve_asset(name: str, kind: str) -> Path:
    """Resolve a robot/task argument: direct path, or a preset name."""
    p = Path(name)
    if p.exists():
        return p
    for base in asset_dirs():
        for candidate in (base / kind / f"{name}.toml", base / kind / name):
            if candidate.exists():
                return candidate
    raise FileNotFoundError(f"no {kind[:-1]} named {name!r} (searched {asset_dirs()})")


def _load_robot_arg(name):
    return store.load_robot(resolve_asset(name, "robots"))


def _load_task_arg(name):
    return store.load_task(resolve_asset(name, "tasks"))


def _parse_arch(text: str):
    try:
        depth, width = text.lower().split("x")
        return int(depth), int(width)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad architecture {text!r}, expected DxW")


def _parse_floats(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_demo_gen(args) -> int:
    try:
        task = _load_task_arg(args.task)
        spec = _load_robot_arg(args.robot)
        mesh = load_mesh(task.anatomy.mesh_path) if task.variant == "anatomy" else None
    except (FileNotFoundError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR
    if args.count < 1:
        print("error: --count must be >= 1", file=sys.stderr)
        return EXIT_BAD_ARGS
    try:
        demos = tasks.generate_dataset(
            task, spec, args.count, m=args.waypoints,
            noise_amplitude=args.noise, seed=args.seed, mesh=mesh)
    except TendonLfdError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    out = Path(args.out)
    if out.exists():
        out.unlink()  # regenerate rather than append for reproducibility
    store.append_demos(out, demos)
    params = {k: v for k, v in vars(args).items() if k != "func"}
    store.write_manifest(out, "demo-gen", params | {"task_variant": task.variant},
                         [resolve_asset(args.task, "tasks"),
                          resolve_asset(args.robot, "robots")], seed=args.seed)
    print(f"wrote {len(demos)} demonstrations to {out}")
    return 0


def _train_model(data, args):
    if args.model == "linear":
        return learning.train_linear_ridge(data, args.alpha)
    if args.model == "rbf":
        return learning.train_kernel_ridge(data, args.alpha, args.gamma)
    depth, width = args.arch
    layers = [SCHEMA_DIMS[data.schema]] + [width] * depth + [3 * data.m]
    hyper = NetHyper(learning_rate=args.learning_rate, epochs=args.epochs,
                     batch_size=args.batch_size, seed=args.net_seed,
                     weight_decay=args.weight_decay)
    return learning.train_trajectory_net(data, layers, hyper)


def _training_objective(model, data) -> float:
    x, y = data.design_matrices()
    if isinstance(model, learning.LinearRidgeModel):
        resid = x @ model.weights - y
        return float(np.sum(resid ** 2) + model.alpha * np.sum(model.weights ** 2))
    if isinstance(model, learning.KernelRidgeModel):
        phi = learning._gram(x, model.centers, model.gamma)
        resid = phi @ model.dual_weights - y
        return float(np.sum(resid ** 2) + model.alpha * np.sum(model.dual_weights ** 2))
    return model.final_loss


def cmd_train(args) -> int:
    try:
        demos = store.load_demos(args.demos)
        data = store.demos_to_training_set(demos)
    except (OSError, ParseError, SchemaMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR
    try:
        model = _train_model(data, args)
    except SingularSystem as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    learning.save_model(model, args.out)
    store.write_manifest(args.out, "train",
                         {k: v for k, v in vars(args).items() if k != "func"},
                         [args.demos])
    print(f"final training objective: {_training_objective(model, data):.6e}")
    return 0


def cmd_eval(args) -> int:
    try:
        model = learning.load_model(args.model)
        spec = _load_robot_arg(args.robot)
    except (OSError, FileNotFoundError, ParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR
    settings = IkSettings()
    try:
        if args.demos:  # vs_demo: held-out demonstrations are ground truth
            demos = store.load_demos(args.demos)
            cases = [(d.context, d.trajectory) for d in demos]
            report = metrics.evaluate_model(model, cases, spec, settings,
                                            "vs_demo", model_id=args.model)
        else:  # vs_reference: fresh contexts against the eight reference curve
            ref_demos = store.load_demos(args.reference)
            reference = metrics.reference_curve(ref_demos)
            task = _load_task_arg(args.task)
            rng = np.random.default_rng(args.seed)
            contexts = [tasks.sample_context(task, rng) for _ in range(args.count)]
            report = metrics.evaluate_model(model, [(c, None) for c in contexts],
                                            spec, settings, "vs_reference",
                                            reference=reference, model_id=args.model)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR
    Path(args.report).write_text(report.to_csv())
    store.write_manifest(args.report, "eval",
                         {k: v for k, v in vars(args).items() if k != "func"},
                         [args.model])
    print(f"mean frechet: {report.mean:.6f} m (std {report.std:.6f}) over "
          f"{len(report.distances)} cases -> {args.report}")
    return 0


def cmd_exec(args) -> int:
    try:
        model = learning.load_model(args.model)
        spec = _load_robot_arg(args.robot)
    except (OSError, FileNotFoundError, ParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR
    k = SCHEMA_DIMS[model.schema]
    try:
        values = _parse_floats(args.context)
        if len(values) == k - 1:
            values.append(1.0)  # bias element may be omitted on the command line
        context = ContextVector(np.array(values), model.schema)
    except (ValueError, TendonLfdError) as exc:
        print(f"error: malformed context: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    settings = IkSettings()
    predicted = learning.predict(model, context)
    plan = plan_config_trajectory(spec, predicted, neutral_config(spec), settings)
    lines = []
    n = spec.n_tendons
    header = [f"tension_{i}" for i in range(n)] + ["insertion", "rotation",
              "tip_x", "tip_y", "tip_z", "residual_m"]
    lines.append(",".join(header))
    for cfg, res in zip(plan.waypoints, plan.residuals):
        tip = fk_tip(spec, cfg, settings.fk_steps)
        row = list(cfg.tensions) + [cfg.insertion, cfg.rotation] + list(tip) + [res]
        lines.append(",".join(repr(float(v)) for v in row))
    Path(args.out).write_text("\n".join(lines) + "\n")
    store.write_manifest(args.out, "exec",
                         {k_: v for k_, v in vars(args).items() if k_ != "func"},
                         [args.model])
    print(f"wrote {len(plan.waypoints)} waypoints to {args.out}")
    return 0


def cmd_grid_search(args) -> int:
    try:
        demos = store.load_demos(args.demos)
        store.demos_to_training_set(demos)  # schema consistency check
    except (OSError, ParseError, SchemaMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR
    n_hold = max(1, int(round(args.holdout * len(demos))))
    if n_hold >= len(demos):
        print("error: holdout fraction leaves no training data", file=sys.stderr)
        return EXIT_BAD_ARGS
    train_demos, hold_demos = demos[:-n_hold], demos[-n_hold:]
    data = store.demos_to_training_set(train_demos)

    if args.family == "linear":
        grid = [{"alpha": a} for a in args.alphas]
    elif args.family == "rbf":
        grid = [{"alpha": a, "gamma": g} for g in args.gammas for a in args.alphas]
    else:
        grid = [{"hidden": arch, "epochs": args.epochs, "seed": args.net_seed,
                 "weight_decay": args.weight_decay}
                for arch in args.archs]

    truth = {id(d.context): d.trajectory for d in hold_demos}

    def scorer(model, context):
        predicted = learning.predict(model, context)
        return metrics.frechet_distance(predicted, truth[id(context)])

    best, table = learning.grid_search(
        data, args.family, grid, [d.context for d in hold_demos], scorer)

    lines = ["params,score_m,best"]
    for params, score in table:
        tag = "*" if params == best else ""
        lines.append(f"\"{json.dumps(params)}\",{score!r},{tag}")
    Path(args.report).write_text("\n".join(lines) + "\n")
    store.write_manifest(args.report, "grid-search",
                         {k: v for k, v in vars(args).items() if k != "func"},
                         [args.demos])
    print(f"best {args.family} hyperparameters: {best}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .teleop import create_app

    try:
        spec = _load_robot_arg(args.robot)
        task = _load_task_arg(args.task)
    except (FileNotFoundError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR
    app = create_app(spec, task, args.demos_out)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"bind failure: {exc}", file=sys.stderr)
        return EXIT_BIND
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tendonlfd",
        description="Learning context-dependent tasks from demonstration on a "
                    "simulated tendon-driven continuum robot.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo-gen", help="generate synthetic demonstrations")
    p.add_argument("--task", required=True, help="task file or preset name")
    p.add_argument("--robot", required=True, help="robot file or preset name")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--waypoints", type=int, default=50, metavar="M")
    p.add_argument("--noise", type=float, default=0.002, help="noise amplitude [m]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_demo_gen)

    p = sub.add_parser("train", help="train a context-to-trajectory model")
    p.add_argument("--model", choices=("linear", "rbf", "net"), required=True)
    p.add_argument("--demos", required=True)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--gamma", type=float, default=10.0)
    p.add_argument("--arch", type=_parse_arch, default=(2, 128), metavar="DxW")
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=5000)
    p.add_argument("--batch-size", type=int, default=0)
    p.add_argument("--weight-decay", type=float, default=0.0)
    p.add_argument("--net-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model end to end (predict, IK, Frechet)")
    p.add_argument("--model", required=True)
    p.add_argument("--robot", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--demos", help="held-out demo store (vs_demo mode)")
    group.add_argument("--reference", help="training store for the eight reference curve")
    p.add_argument("--task", help="task file (vs_reference context sampling)")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("exec", help="execute a model prediction on the robot")
    p.add_argument("--model", required=True)
    p.add_argument("--context", required=True, help="comma-separated context values")
    p.add_argument("--robot", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_exec)

    p = sub.add_parser("grid-search", help="hyperparameter grid search")
    p.add_argument("--family", choices=("linear", "rbf", "net"), required=True)
    p.add_argument("--demos", required=True)
    p.add_argument("--holdout", type=float, default=0.2)
    p.add_argument("--alphas", type=_parse_floats, default=[0.01, 0.1, 1.0, 10.0])
    p.add_argument("--gammas", type=_parse_floats, default=[0.01, 0.1, 1.0, 10.0])
    p.add_argument("--archs", type=lambda s: [_parse_arch(a) for a in s.split(",")],
                   default=[(2, 16), (2, 32), (2, 64), (2, 128), (3, 32), (3, 64), (3, 128)])
    p.add_argument("--epochs", type=int, default=5000)
    p.add_argument("--net-seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_grid_search)

    p = sub.add_parser("serve", help="run the teleop session server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8732)
    p.add_argument("--robot", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--demos-out", required=True)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Held-out evaluation on the double-sphere and anatomy tasks.

Trains the three context models on synthetic demonstrations and scores the
executed trajectories directly against held-out demonstrations (Frechet
distance per test case). Writes one CSV row per model.
"""

import argparse
import csv
import sys
import time

from tendonlfd import learning, metrics, store, tasks
from tendonlfd.cli import resolve_asset
from tendonlfd.ik import IkSettings
from tendonlfd.learning import SCHEMA_DIMS, NetHyper
from tendonlfd.mesh import load_mesh

ROBOTS = {"double_sphere": "robot_eight", "anatomy": "robot_anatomy"}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--task", choices=sorted(ROBOTS), default="double_sphere")
    ap.add_argument("--train-demos", type=int, default=20)
    ap.add_argument("--test-demos", type=int, default=10)
    ap.add_argument("--waypoints", type=int, default=50)
    ap.add_argument("--noise", type=float, default=0.002)
    ap.add_argument("--train-seed", type=int, default=0)
    ap.add_argument("--test-seed", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    spec = store.load_robot(resolve_asset(ROBOTS[args.task], "robots"))
    task = store.load_task(resolve_asset(args.task, "tasks"))
    mesh = load_mesh(task.anatomy.mesh_path) if args.task == "anatomy" else None
    ik = IkSettings(fk_steps=100)
    m = args.waypoints

    t0 = time.time()
    train = tasks.generate_dataset(task, spec, args.train_demos, m=m,
                                   noise_amplitude=args.noise,
                                   seed=args.train_seed, ik_settings=ik,
                                   mesh=mesh)
    test = tasks.generate_dataset(task, spec, args.test_demos, m=m,
                                  noise_amplitude=args.noise,
                                  seed=args.test_seed, ik_settings=ik,
                                  mesh=mesh)
    print(f"generated {len(train)}+{len(test)} demos in {time.time() - t0:.1f} s")

    data = store.demos_to_training_set(train)
    cases = [(d.context, d.trajectory) for d in test]
    hyper = NetHyper(learning_rate=3e-3, epochs=20000, weight_decay=0.1, seed=0)
    layers = [SCHEMA_DIMS[task.variant], 128, 128, 3 * m]
    models = [("linear", learning.train_linear_ridge(data, 0.01)),
              ("rbf", learning.train_kernel_ridge(data, 0.01, 10.0)),
              ("net", learning.train_trajectory_net(data, layers, hyper))]

    rows = []
    for name, model in models:
        report = metrics.evaluate_model(model, cases, spec, ik, "vs_demo",
                                        fk_steps=ik.fk_steps, model_id=name)
        rows.append({"model": name, "mean_frechet_m": report.mean,
                     "std_frechet_m": report.std,
                     "mean_ik_residual_m": float(report.ik_residuals.mean())})
        print(f"{name:>8s} mean {report.mean:.5f} m std {report.std:.5f} m")

    out = args.out or f"{args.task}_eval.csv"
    with open(out, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out} ({time.time() - t0:.1f} s total)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

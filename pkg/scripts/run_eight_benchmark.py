#!/usr/bin/env python3
"""Figure-eight generalization benchmark.

Generates synthetic demonstrations, trains all three context models, scores
each against the reference curve on fresh contexts, and sweeps the network
over growing training-set sizes. Writes one CSV row per (model, demo count).
"""

import argparse
import csv
import sys
import time

import numpy as np

from tendonlfd import learning, metrics, store, tasks
from tendonlfd.cli import resolve_asset
from tendonlfd.ik import IkSettings
from tendonlfd.learning import SCHEMA_DIMS, NetHyper


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--demos", type=int, default=50)
    ap.add_argument("--waypoints", type=int, default=50)
    ap.add_argument("--noise", type=float, default=0.002)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eval-count", type=int, default=50)
    ap.add_argument("--eval-seed", type=int, default=42)
    ap.add_argument("--sweep", type=int, nargs="*", default=[5, 10, 20, 30, 40, 50])
    ap.add_argument("--out", default="eight_benchmark.csv")
    args = ap.parse_args()

    spec = store.load_robot(resolve_asset("robot_eight", "robots"))
    task = store.load_task(resolve_asset("eight", "tasks"))
    ik = IkSettings(fk_steps=100)
    m = args.waypoints

    t0 = time.time()
    train = tasks.generate_dataset(task, spec, args.demos, m=m,
                                   noise_amplitude=args.noise, seed=args.seed,
                                   ik_settings=ik)
    reference = metrics.reference_curve(train)
    rng = np.random.default_rng(args.eval_seed)
    cases = [(tasks.sample_context(task, rng), None)
             for _ in range(args.eval_count)]
    print(f"generated {args.demos} demos in {time.time() - t0:.1f} s")

    hyper = NetHyper(learning_rate=3e-3, epochs=20000, weight_decay=0.1, seed=0)
    layers = [SCHEMA_DIMS[task.variant], 128, 128, 3 * m]
    rows = []

    def run(name, model, count):
        report = metrics.evaluate_model(model, cases, spec, ik, "vs_reference",
                                        reference=reference, fk_steps=ik.fk_steps,
                                        model_id=name)
        rows.append({"model": name, "demos": count,
                     "mean_frechet_m": report.mean, "std_frechet_m": report.std})
        print(f"{name:>8s} D={count:<3d} mean {report.mean:.5f} m "
              f"std {report.std:.5f} m")

    data = store.demos_to_training_set(train)
    run("linear", learning.train_linear_ridge(data, 0.01), args.demos)
    run("rbf", learning.train_kernel_ridge(data, 0.01, 10.0), args.demos)
    for count in args.sweep:
        sub = store.demos_to_training_set(train[:count])
        run("net", learning.train_trajectory_net(sub, layers, hyper), count)

    with open(args.out, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out} ({len(rows)} rows, {time.time() - t0:.1f} s total)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

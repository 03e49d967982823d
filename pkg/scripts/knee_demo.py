"""Inertia curve and chosen k for seeded Gaussian blobs, as a quick sanity plot in text."""

import argparse

import numpy as np

from mavens.opinion import choose_k, inertia_curve
from mavens.testkit import adjusted_rand_index


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--blobs", type=int, default=4)
    ap.add_argument("--per-blob", type=int, default=50)
    ap.add_argument("--std", type=float, default=0.6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    centers = rng.uniform(-20, 20, size=(args.blobs, 3))
    labels = np.repeat(np.arange(args.blobs), args.per_blob)
    x = centers[labels] + rng.normal(scale=args.std, size=(len(labels), 3))
    curve, fits = inertia_curve(x, range(1, 2 * args.blobs + 3), seed=args.seed)
    k = choose_k(curve)
    top = max(curve.values())
    for kk, v in curve.items():
        bar = "#" * int(50 * v / top)
        print(f"k={kk:<3} {v:12.2f} {bar}{'  <- knee' if kk == k else ''}")
    print(f"chosen k={k}, ARI vs generator labels {adjusted_rand_index(fits[k].assignments, labels.tolist()):.4f}")


if __name__ == "__main__":
    main()

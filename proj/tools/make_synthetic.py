#!/usr/bin/env python3
"""Regenerates the small synthetic UCR-format datasets under data/synthetic."""

import argparse
import pathlib

import numpy as np


def znorm(x):
    sd = x.std()
    return (x - x.mean()) / sd if sd > 0 else x - x.mean()


def sine(rng, label, n):
    t = np.arange(n)
    period = 16.0 if label == 1 else 8.0
    return np.sin(2 * np.pi * t / period + rng.uniform(0, 2 * np.pi)) + rng.normal(0, 0.3, n)


def trend(rng, label, n):
    t = np.linspace(0, 1, n)
    slope = {1: 2.0, 2: -2.0, 3: 0.0}[label]
    return slope * t + 0.5 * np.sin(2 * np.pi * t * rng.uniform(1, 3)) + rng.normal(0, 0.25, n)


def bump(rng, label, n):
    t = np.arange(n)
    centre = (0.25 if label == 1 else 0.75) * n + rng.normal(0, 2)
    return 3.0 * np.exp(-0.5 * ((t - centre) / 4.0) ** 2) + rng.normal(0, 0.3, n)


DATASETS = {
    "SynthSine": (sine, [1, 2], 64),
    "SynthTrend": (trend, [1, 2, 3], 48),
    "SynthBump": (bump, [1, 2], 60),
}


def write_split(path, rows):
    with open(path, "w") as f:
        for label, values in rows:
            f.write("\t".join([str(label)] + [f"{v:.6f}" for v in values]) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic")
    parser.add_argument("--seed", type=int, default=20240101)
    parser.add_argument("--per-class-train", type=int, default=8)
    parser.add_argument("--per-class-test", type=int, default=10)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    for name, (gen, labels, length) in DATASETS.items():
        d = pathlib.Path(args.out) / name
        d.mkdir(parents=True, exist_ok=True)
        for split, per_class in (("TRAIN", args.per_class_train), ("TEST", args.per_class_test)):
            rows = [(lab, znorm(gen(rng, lab, length))) for lab in labels for _ in range(per_class)]
            order = rng.permutation(len(rows))
            write_split(d / f"{name}_{split}.tsv", [rows[i] for i in order])


if __name__ == "__main__":
    main()

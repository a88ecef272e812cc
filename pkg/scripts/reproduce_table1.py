"""Noise sweep on the circle example: iteration counts and regularization parameters.

    python scripts/reproduce_table1.py --seeds 0,1,2 --out runs/table1
"""

import argparse
import logging

import numpy as np

from elasto_coinv import cli


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--config", default="ex3_circle")
    p.add_argument("--noise", default="0,0.01,0.05")
    p.add_argument("--seeds", default="7")
    p.add_argument("--out", default="runs/table1")
    p.add_argument("--workers", type=int, default=None)
    args = p.parse_args()
    logging.basicConfig(level=logging.WARNING)

    noise = [float(v) for v in args.noise.split(",")]
    seeds = [int(v) for v in args.seeds.split(",")]
    rows = cli.sweep(args.config, noise, seeds, args.out, workers=args.workers)

    print(f"{'noise':>6} {'steps':>6} {'alpha':>12} {'boundary':>9} {'impedance':>9}")
    for nz in noise:
        sel = [r for r in rows if r["noise"] == nz and r["exit_code"] == 0]
        if not sel:
            print(f"{nz:6.0%}  no converged runs")
            continue
        steps = np.median([r["steps"] for r in sel])
        alpha = np.median([r["alpha"] for r in sel])
        be = np.median([r["boundary_error"] for r in sel])
        ie = np.median([r["impedance_error"] for r in sel])
        print(f"{nz:6.0%} {steps:6.0f} {alpha:12.4e} {be:9.2%} {ie:9.2%}")
    print(f"per-run table: {args.out}/sweep.csv")


if __name__ == "__main__":
    main()

"""Morozov parameter over many noise seeds, for a range of measured-arc node counts.

Shows how the chosen regularization parameter at a fixed relative noise level
depends on the discretization of the measured arc.
"""

import argparse
import warnings

import numpy as np

from elasto_coinv.config import load_config, resolve_config_path
from elasto_coinv.pipeline import prepare


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--config", default="ex3_circle")
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--nodes", default="16,32,64")
    p.add_argument("--seeds", type=int, default=20)
    args = p.parse_args()

    path = resolve_config_path(args.config)
    for m in (int(v) for v in args.nodes.split(",")):
        alphas = []
        for seed in range(args.seeds):
            cfg = load_config(path=path, overrides=[f"cauchy.arc_nodes={m}", f"noise.delta={args.noise}", f"noise.seed={seed}"])
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                alphas.append(prepare(cfg)[4].alpha)
        a = np.array(alphas)
        print(f"arc nodes {m:4d}: alpha min {a.min():.2e}  median {np.median(a):.2e}  max {a.max():.2e}")


if __name__ == "__main__":
    main()

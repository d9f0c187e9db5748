"""Multi-seed degree-law run: histograms, tail exponents, law comparison.

Example:
    python3 scripts/degree_law_sweep.py --model base --n 100000 --trials 5 \
        --out runs/degrees
"""
from __future__ import annotations

import argparse

from gpanet.harness import ExperimentSpec, run_experiment
from gpanet.models import ModelConfig


def main():
    ap = argparse.ArgumentParser(description="Degree-law sweep over seeds")
    ap.add_argument("--model", default="base")
    ap.add_argument("--n", type=int, default=10 ** 5)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--xi", type=float, default=1.0)
    ap.add_argument("--r", type=float, default=0.3)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--master-seed", type=int, default=7)
    ap.add_argument("--kmin", type=int, default=None)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    options = {}
    if args.kmin is not None:
        options["degrees"] = {"k_min": args.kmin}
    cfg = ModelConfig(model=args.model, n=args.n, m=args.m, xi=args.xi,
                      r=args.r, seed=0)
    spec = ExperimentSpec.from_master(cfg, args.master_seed, args.trials,
                                      ("degrees",), args.out, options)
    print(f"[degree_law] model={args.model} n={args.n} trials={args.trials} "
          f"-> {args.out}")
    index = run_experiment(spec)
    print(f"[degree_law] wrote {len(index['artifacts'])} artifacts, "
          f"{len(index['errors'])} errors")


if __name__ == "__main__":
    main()

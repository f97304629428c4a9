"""Random-start probe of the four-versus-three segment conjecture.

Prints a summary per K; counterexamples are listed in full.
"""
import argparse
import time

import numpy as np

from partialsearch.cli import dumps
from partialsearch.explorer import conjecture_probe


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--K", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--starts", type=int, default=200)
    ap.add_argument("--grid-step", type=float, default=1e-2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = []
    for K in args.K:
        t0 = time.perf_counter()
        r = conjecture_probe(K, grid_step=args.grid_step, n_starts=args.starts, seed=args.seed)
        gaps = np.array([rec["gap"] for rec in r.records])
        out.append({"K": K, "starts": args.starts + 1, "probed": len(r.records), "excluded": r.excluded,
                    "max_gap": float(gaps.max()), "mean_gap": float(gaps.mean()),
                    "s1_three_cost": r.best_queries, "grk_cost": r.grk_queries,
                    "counterexamples": r.counterexamples, "seconds": time.perf_counter() - t0})
    print(dumps({"grid_step": args.grid_step, "seed": args.seed, "units": "queries/sqrt(N)", "results": out}))


if __name__ == "__main__":
    main()

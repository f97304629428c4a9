"""Three-segment scan for several K, with the GRK formula alongside."""
import argparse
import math

from partialsearch.cli import dumps
from partialsearch.explorer import scan_three_segment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=4096)
    ap.add_argument("--K", type=int, nargs="+", default=[3, 4, 5, 8, 16])
    ap.add_argument("--grid-step", type=float, default=1e-3)
    args = ap.parse_args()
    rows = []
    for K in args.K:
        r = scan_three_segment(K, args.N, args.grid_step)
        rows.append({"K": K, "best_queries": r.best_queries, "grk_queries": r.grk_queries,
                     "difference": r.best_queries - r.grk_queries, "best_plan": list(r.best_plan),
                     "counterexamples": len(r.counterexamples),
                     "queries_over_sqrtN": r.best_queries / math.sqrt(args.N)})
    print(dumps({"N": args.N, "grid_step": args.grid_step, "rows": rows}))


if __name__ == "__main__":
    main()

"""GRK success versus block size at fixed K, full statevector."""
import argparse

from partialsearch import planner
from partialsearch.cli import dumps
from partialsearch.core import make_space


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--K", type=int, default=4)
    ap.add_argument("--b", type=int, nargs="+", default=[16, 64, 256, 1024, 4096])
    ap.add_argument("--rep", default="full", choices=planner.REPRESENTATIONS)
    args = ap.parse_args()
    rows = []
    for b in args.b:
        run = planner.run_grk(make_space(args.K * b, args.K), args.rep)
        rows.append({"b": b, "N": args.K * b, "j1": run.j1, "j2": run.j2, "queries": run.queries,
                     "u_amplitude": run.u_amplitude,
                     "target_block_probability": run.target_block_probability,
                     "asymptotic_queries": planner.asymptotic_queries(args.K * b, args.K)})
    print(dumps({"K": args.K, "representation": args.rep, "rows": rows}))


if __name__ == "__main__":
    main()

"""Two cones whose sum is not positive at any separation, although each cone is.

Runs the test-function search for every separation given, then the two binding
checks on the same pair of configurations.

    python scripts/counterexample_demo.py --dim 4 --lam 0.2 --mu 1 10 100
"""
import argparse
import json

from dipolar.analyzer import binding_necessary, binding_sufficient
from dipolar.rayleigh import counterexample_search, counterexample_window, example_configurations


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--lam", type=float, default=0.2)
    p.add_argument("--mu", type=float, nargs="+", default=[1.0, 10.0])
    p.add_argument("--sweep-csv", help="write the search sweep of the first separation here")
    args = p.parse_args(argv)

    lo, hi = counterexample_window(args.dim)
    print(f"lambda window ({lo:g}, {hi:g}); lambda = {args.lam:g}")
    first = None
    for mu in args.mu:
        res = counterexample_search(args.dim, args.lam, mu)
        first = first or res
        print(f"mu = {mu:<8g} ratio = {res.best_ratio:.6f}  -> {res.verdict}")
    A, B = example_configurations(args.dim, args.lam, first.delta)
    print("necessary binding condition:", json.dumps(binding_necessary(A, B).to_json()))
    print("sufficient binding condition:", json.dumps(binding_sufficient(A, B).to_json()))
    if args.sweep_csv:
        with open(args.sweep_csv, "w") as fh:
            fh.write(first.sweep_csv())


if __name__ == "__main__":
    main()

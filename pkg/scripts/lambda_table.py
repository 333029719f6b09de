"""Table of the dipole Hardy constant Lambda_N for a range of dimensions.

    python scripts/lambda_table.py --dims 3 10 --basis-size 200
"""
import argparse
import csv
import sys

from dipolar.rayleigh import optimize_hardy_ratio
from dipolar.thresholds import lambda_n


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs=2, default=(3, 8), metavar=("FIRST", "LAST"))
    p.add_argument("--basis-size", type=int, default=200)
    p.add_argument("--rayleigh", action="store_true",
                   help="also report the optimized test-function lower bound")
    args = p.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    header = ["N", "lambda_N", "lambda_N_2L", "critical_strength", "hardy_cap"]
    if args.rayleigh:
        header.append("rayleigh_lower_bound")
    w.writerow(header)
    for N in range(args.dims[0], args.dims[1] + 1):
        r = lambda_n(N, args.basis_size)
        row = [N, f"{r.value:.12f}", f"{r.refined_value:.12f}", f"{r.critical_scale:.12f}",
               f"{4.0 / (N - 2) ** 2:.12f}"]
        if args.rayleigh:
            row.append(f"{optimize_hardy_ratio(N).ratio:.12f}")
        w.writerow(row)


if __name__ == "__main__":
    main()

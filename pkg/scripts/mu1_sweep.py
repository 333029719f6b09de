"""mu_1(s h) over a range of scales, with the sandwich bounds and the two thresholds
-((N-2)/2)^2 (positivity) and -((N-2)/2)^2 + 1 (essential self-adjointness).

    python scripts/mu1_sweep.py --dim 5 --kind dipole --max-scale 12 --steps 25
"""
import argparse
import csv
import sys

import numpy as np

from dipolar.potentials import AxisymmetricProfile, Dipole
from dipolar.spectrum import mu1_value
from dipolar.thresholds import hardy_level


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--kind", choices=("dipole", "band"), default="dipole")
    p.add_argument("--max-scale", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--basis-size", type=int, default=200)
    args = p.parse_args(argv)

    N = args.dim
    h = Dipole(N, 1.0) if args.kind == "dipole" else AxisymmetricProfile.band(N, 1.0, 0.5, 1.0)
    a2 = hardy_level(N)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["scale", "mu1", "minus_ess_sup", "minus_mean", "positive", "self_adjoint"])
    for s in np.linspace(0.0, args.max_scale, args.steps):
        g = h.scaled(float(s))
        m = mu1_value(g, args.basis_size)
        w.writerow([f"{s:.6g}", f"{m:.12g}", f"{-g.ess_sup:.12g}", f"{-g.mean:.12g}",
                    int(m > -a2), int(m >= -a2 + 1.0)])


if __name__ == "__main__":
    main()

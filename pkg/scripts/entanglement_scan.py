"""Spectator and common-environment models across initial entanglement theta."""
import argparse
import math
import warnings

import numpy as np

from purity_ensembles.analysis import compare_ensembles
from purity_ensembles.dynamics import COMMON, SPECTATOR, HamiltonianModel, InitialStateSpec, run_dynamic_ensemble
from purity_ensembles.marginals import marginal_lambda1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--P", type=float, default=0.8)
    ap.add_argument("--N", type=int, default=5000)
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)
    curve = marginal_lambda1(args.m, args.P)
    print("theta    spectator_K  common_K")
    for theta in np.linspace(0, math.pi / 4, args.points):
        ks = []
        for kind in (SPECTATOR, COMMON):
            ens = run_dynamic_ensemble(HamiltonianModel(kind, args.m), InitialStateSpec(float(theta)),
                                       args.P, args.N, seed=args.seed, workers=args.workers)
            ks.append(compare_ensembles(curve, ens.spectra).K)
        print(f"{theta:.4f}   {ks[0]:.4f}       {ks[1]:.4f}")


if __name__ == "__main__":
    main()

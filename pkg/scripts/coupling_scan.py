"""Kolmogorov distance of the tunable-coupling model from the exact lam1 marginal."""
import argparse
import warnings

import numpy as np

from purity_ensembles.analysis import compare_ensembles
from purity_ensembles.dynamics import COUPLING, GLOBAL, HamiltonianModel, InitialStateSpec, run_dynamic_ensemble
from purity_ensembles.marginals import marginal_lambda1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--P", type=float, nargs="+", default=[0.4, 0.8])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0])
    ap.add_argument("--N", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)
    for P in args.P:
        curve = marginal_lambda1(args.m, P)
        ref = run_dynamic_ensemble(HamiltonianModel(GLOBAL, args.m), InitialStateSpec(), P, args.N,
                                   seed=args.seed, workers=args.workers)
        g = compare_ensembles(curve, ref.spectra)
        print(f"P={P}  global: K={g.K:.4f} +- {g.error_bar:.4f}")
        for eps in args.eps:
            ens = run_dynamic_ensemble(HamiltonianModel(COUPLING, args.m, eps), InitialStateSpec(), P,
                                       args.N, seed=args.seed, workers=args.workers)
            rep = compare_ensembles(curve, ens.spectra)
            tmed = float(np.nanmedian(ens.t_hit))
            print(f"  eps={eps:<6g} K={rep.K:.4f}  discarded={ens.discard_fraction:.1%}  median t={tmed:.3g}")


if __name__ == "__main__":
    main()

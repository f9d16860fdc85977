"""Chart-region Metropolis samples against the exact fixed-purity density.

Prints K and the sampling error bar for a few (m, P) pairs.
"""
import argparse
import time

from purity_ensembles.analysis import CHART, compare_ensembles
from purity_ensembles.mcmc import CHART as CHART_REGION
from purity_ensembles.mcmc import ChainConfig, run_chain
from purity_ensembles.static import StaticEnsembleSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=100_000)
    ap.add_argument("--bins", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("m     P     K        error_bar  seconds")
    for m, P in [(4, 0.4), (8, 0.4), (16, 0.4), (16, 0.8), (32, 0.6)]:
        t0 = time.time()
        spec = StaticEnsembleSpec(m=m, value=P)
        res = run_chain(ChainConfig(spec, total_samples=args.N, seed=args.seed, region=CHART_REGION))
        rep = compare_ensembles(spec, res.chart, CHART, bins=args.bins, seed=args.seed)
        print(f"{m:<5d} {P:<5.2f} {rep.K:.5f}  {rep.error_bar:.5f}    {time.time() - t0:.1f}")


if __name__ == "__main__":
    main()

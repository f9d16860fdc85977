"""Which chart weight describes Haar-random states conditioned on their purity?

Haar states of env (x) cen are drawn, those with purity in a thin shell
around P are kept, and their smallest-eigenvalue histogram is compared with
the exact marginal for each Jacobian power k.
"""
import argparse

import numpy as np

from purity_ensembles.analysis import compare_ensembles
from purity_ensembles.marginals import marginal_lambda1


def haar_spectra(m, n, count, rng, chunk=50_000):
    out = []
    while count > 0:
        k = min(chunk, count)
        v = rng.standard_normal((k, m, n)) + 1j * rng.standard_normal((k, m, n))
        rho = np.einsum("kec,ked->kcd", v, v.conj())
        rho /= np.trace(rho, axis1=1, axis2=2).real[:, None, None]
        out.append(np.linalg.eigvalsh(rho))
        count -= k
    return np.concatenate(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=6)
    ap.add_argument("--P", type=float, default=0.4)
    ap.add_argument("--shell", type=float, default=0.003)
    ap.add_argument("--draws", type=int, default=400_000)
    ap.add_argument("--bins", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    lam = haar_spectra(args.m, 4, args.draws, np.random.default_rng(args.seed))
    kept = lam[np.abs((lam ** 2).sum(axis=1) - args.P) < args.shell]
    print(f"{len(kept)} of {args.draws} Haar draws inside the shell")
    for k in (-1, 0, 1):
        rep = compare_ensembles(marginal_lambda1(args.m, args.P, resolution=256, jacobian_power=k),
                                kept, bins=args.bins)
        print(f"k={k:+d}  K={rep.K:.4f}  error bar={rep.error_bar:.4f}")


if __name__ == "__main__":
    main()

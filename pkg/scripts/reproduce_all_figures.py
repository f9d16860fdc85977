"""Write the data files behind every figure into one directory."""
import argparse
import time

from purity_ensembles.figures import FIGURES, SCALES, reproduce_figure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--scale", choices=sorted(SCALES), default="quick")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--only", type=int, nargs="*", default=list(FIGURES))
    args = ap.parse_args()
    for number in args.only:
        t0 = time.time()
        files = reproduce_figure(number, args.out_dir, scale=args.scale, seed=args.seed, workers=args.workers)
        print(f"figure {number}: {len(files)} files in {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()

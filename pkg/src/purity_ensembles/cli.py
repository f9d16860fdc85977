"""Command-line interface.

Every subcommand writes its data atomically and drops a ``<file>.json``
manifest next to it holding the resolved arguments.  A ``--config`` file of
``key = value`` lines supplies defaults; explicit flags win.

Exit codes: 0 success, 2 usage or invalid argument, 3 numerical or
configuration failure.  Failures print a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import compare_ensembles, entropy_distribution_at_fixed_purity
from .dynamics import MODEL_KINDS, HamiltonianModel, InitialStateSpec, run_dynamic_ensemble
from .errors import EnsembleError, InvalidArgument, Unsupported
from .figures import FIGURES, SCALES, reproduce_figure
from .io import (
    SPECTRUM_COLUMNS,
    read_manifest,
    read_spectra,
    write_csv,
    write_json,
    write_manifest,
)
from .marginals import LAMBDA1, LAMBDA2, marginal
from .mcmc import CHART, ORDERED, ChainConfig, run_chain
from .simplex import project_spectrum, region_mask, trace_region_curves
from .static import ENTROPY, PURITY, StaticEnsembleSpec, point_grid

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _log_base(text: str) -> float:
    if text in ("e", "E", "nat", "nats"):
        return math.e
    if text in ("bit", "bits"):
        return 2.0
    try:
        val = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad log base {text!r}") from exc
    if not val > 1:
        raise argparse.ArgumentTypeError("log base must exceed 1")
    return val


def _add_spec_args(p, with_entropy=True):
    p.add_argument("--m", type=int, default=16, help="environment dimension")
    p.add_argument("--n", type=int, default=4, help="central-system dimension")
    p.add_argument("--P", type=float, default=0.4, help="purity")
    if with_entropy:
        p.add_argument("--S", type=float, default=None,
                       help="fixed entropy instead of purity (n = 4)")
        p.add_argument("--log-base", type=_log_base, default=math.e,
                       help="logarithm base of --S: e, 2 or a number")
    p.add_argument("--jacobian-power", type=int, default=1, choices=(-1, 0, 1))


def _spec(args) -> StaticEnsembleSpec:
    if getattr(args, "S", None) is not None:
        return StaticEnsembleSpec(n=args.n, m=args.m, constraint=ENTROPY, value=args.S,
                                  jacobian_power=args.jacobian_power, log_base=args.log_base)
    return StaticEnsembleSpec(n=args.n, m=args.m, constraint=PURITY, value=args.P,
                              jacobian_power=args.jacobian_power)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="purity-ensembles",
                                     description="Fixed-purity eigenvalue ensembles and random decoherence.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", type=Path, help="key = value file of default flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("static-density", help="exact chart density on a grid")
    _add_spec_args(p)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--out", type=Path, default=Path("static_density.csv"))

    p = sub.add_parser("static-sample", help="constrained Metropolis samples")
    _add_spec_args(p)
    p.add_argument("--N", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1000)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--thinning", type=int, default=10)
    p.add_argument("--step-size", type=float, default=None)
    p.add_argument("--region", choices=(ORDERED, CHART), default=ORDERED)
    p.add_argument("--out", type=Path, default=Path("static_samples.csv"))

    p = sub.add_parser("marginal", help="single-eigenvalue marginal by quadrature")
    _add_spec_args(p, with_entropy=False)
    p.add_argument("--which", choices=(LAMBDA1, LAMBDA2), default=LAMBDA1)
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--out", type=Path, default=Path("marginal.csv"))

    p = sub.add_parser("dynamic", help="ensemble of random-Hamiltonian evolutions")
    p.add_argument("--model", choices=MODEL_KINDS, default="global")
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--P", type=float, default=0.8)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--workers", type=int, default=None,
                   help="process count; default from PURITY_ENSEMBLES_WORKERS or the core count")
    p.add_argument("--out", type=Path, default=Path("dynamic.csv"))

    p = sub.add_parser("compare", help="Kolmogorov distance with error bar")
    p.add_argument("--static", required=True, help="'exact' or a sample CSV")
    p.add_argument("--dynamic", required=True, type=Path, help="sample CSV to compare")
    p.add_argument("--marginal", choices=(LAMBDA1, LAMBDA2, CHART), default=LAMBDA1)
    p.add_argument("--m", type=int, default=None, help="default: from the dynamic manifest")
    p.add_argument("--P", type=float, default=None, help="default: from the dynamic manifest")
    p.add_argument("--jacobian-power", type=int, default=1, choices=(-1, 0, 1))
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--replicates", type=int, default=8)
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("comparison.json"))

    p = sub.add_parser("entropy-dist", help="entropy histogram at fixed purity")
    p.add_argument("--P", type=float, default=0.4)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--N", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log-base", type=_log_base, default=math.e)
    p.add_argument("--jacobian-power", type=int, default=1, choices=(-1, 0, 1))
    p.add_argument("--out", type=Path, default=Path("entropy.csv"))

    p = sub.add_parser("project", help="equal-area disk projection of the simplex")
    p.add_argument("--P", type=float, default=0.4)
    p.add_argument("--resolution", type=int, default=721)
    p.add_argument("--mask-grid", type=int, default=0, help="also write a region mask grid")
    p.add_argument("--samples", type=Path, default=None, help="sample CSV to project")
    p.add_argument("--out", type=Path, default=Path("projection.csv"))

    p = sub.add_parser("reproduce-figure", help="data files for one figure")
    p.add_argument("figure", type=int, choices=FIGURES)
    p.add_argument("--scale", choices=sorted(SCALES), default="desk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out-dir", type=Path, default=Path("figures"))
    return parser


def read_config(path: Path) -> list[str]:
    """Flat ``key = value`` lines to flag tokens; ``#`` starts a comment."""
    if not path.exists():
        raise InvalidArgument(f"config file {path} not found")
    tokens = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        tokens += [f"--{key.replace('_', '-')}", value]
    return tokens


def _resolve_argv(argv: list[str]) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, rest = pre.parse_known_args(argv)
    if known.config is None:
        return argv
    extra = read_config(known.config)
    # config flags go right after the subcommand so later explicit flags win
    for i, tok in enumerate(rest):
        if not tok.startswith("-"):
            return rest[: i + 1] + extra + rest[i + 1:]
    return rest + extra


def _manifest(args, **extra) -> dict:
    resolved = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
                if k != "config"}
    return {"command": args.command, "arguments": resolved, "version": __version__, **extra}


def cmd_static_density(args):
    spec = _spec(args)
    grid, dens = point_grid(spec, args.grid)
    rows = ((x, y, dens[i, j]) for i, x in enumerate(grid) for j, y in enumerate(grid))
    write_csv(args.out, ["lambda1", "lambda2", "density"], rows)
    write_manifest(args.out, _manifest(args))


def cmd_static_sample(args):
    spec = _spec(args)
    config = ChainConfig(spec, step_size=args.step_size, burn_in=args.burn_in,
                         thinning=args.thinning, total_samples=args.N, seed=args.seed,
                         chains=args.chains, region=args.region)
    res = run_chain(config)
    write_csv(args.out, SPECTRUM_COLUMNS[: spec.n] if spec.n == 4 else
              [f"lambda{i + 1}" for i in range(spec.n)], res.spectra)
    write_manifest(args.out, _manifest(args, **res.metadata()))


def cmd_marginal(args):
    curve = marginal(args.which, args.m, args.P, resolution=args.resolution,
                     jacobian_power=args.jacobian_power)
    write_csv(args.out, ["lambda", "density"], zip(curve.abscissas, curve.densities))
    write_manifest(args.out, _manifest(args, support=list(curve.support)))


def cmd_dynamic(args):
    model = HamiltonianModel(args.model, args.m, args.eps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        ens = run_dynamic_ensemble(model, InitialStateSpec(args.theta), args.P, args.N,
                                   seed=args.seed, t_max=args.t_max, workers=args.workers)
    rows = []
    it = iter(ens.spectra)
    for ok, t in zip(ens.converged, ens.t_hit):
        lam = next(it) if ok else [float("nan")] * 4
        rows.append((*lam, t, bool(ok)))
    write_csv(args.out, SPECTRUM_COLUMNS + ["t_hit", "converged"], rows)
    write_manifest(args.out, _manifest(args, **ens.manifest))


def cmd_compare(args):
    sample = read_spectra(args.dynamic)
    meta = read_manifest(args.dynamic)
    m = args.m if args.m is not None else meta.get("m")
    P = args.P if args.P is not None else meta.get("P_target", meta.get("value"))
    args.m, args.P = m, P
    if args.static == "exact":
        if m is None or P is None:
            raise InvalidArgument("exact comparison needs --m and --P (or a manifest holding them)")
        if args.marginal == CHART:
            reference = StaticEnsembleSpec(n=4, m=int(m), value=float(P),
                                           jacobian_power=args.jacobian_power)
        else:
            reference = marginal(args.marginal, int(m), float(P), resolution=args.resolution,
                                 jacobian_power=args.jacobian_power)
    else:
        reference = read_spectra(args.static)
    report = compare_ensembles(reference, sample, args.marginal, bins=args.bins,
                               replicates=args.replicates, seed=args.seed,
                               sample_meta={"file": str(args.dynamic), **meta})
    write_json(args.out, {**report.to_dict(), "manifest": _manifest(args)})


def cmd_entropy_dist(args):
    dist = entropy_distribution_at_fixed_purity(args.P, args.m, args.N, bins=args.bins,
                                                seed=args.seed, jacobian_power=args.jacobian_power,
                                                log_base=args.log_base)
    h = dist.histogram
    write_csv(args.out, ["bin_left", "bin_right", "density"], zip(h.edges[:-1], h.edges[1:], h.density))
    write_manifest(args.out, _manifest(args, mean=dist.mean, std=dist.std, N=args.N))


def cmd_project(args):
    rows = []
    for cid, curve in enumerate(trace_region_curves(args.P, args.resolution)):
        for sid, seg in enumerate(curve.segments):
            rows += [(cid, curve.kind, curve.label, sid, x, y) for x, y in seg]
    write_csv(args.out, ["curve_id", "kind", "label", "segment", "x", "y"], rows)
    extra = {}
    if args.mask_grid:
        g, mask = region_mask(args.P, args.mask_grid)
        mpath = args.out.with_name(args.out.stem + "_mask.csv")
        write_csv(mpath, ["x", "y", "region"],
                  ((x, y, mask[i, j]) for i, x in enumerate(g) for j, y in enumerate(g)))
        write_manifest(mpath, _manifest(args, legend={"0": "nonphysical", "1": "physical",
                                                      "2": "physical, ascending"}))
        extra["mask_file"] = mpath.name
    if args.samples is not None:
        lam = read_spectra(args.samples)
        xy = project_spectrum(lam)
        spath = args.out.with_name(args.out.stem + "_samples.csv")
        write_csv(spath, ["x", "y"], xy)
        write_manifest(spath, _manifest(args))
        extra["samples_file"] = spath.name
    write_manifest(args.out, _manifest(args, **extra))


def cmd_reproduce_figure(args):
    files = reproduce_figure(args.figure, args.out_dir, scale=args.scale, seed=args.seed,
                             workers=args.workers)
    print(json.dumps({"figure": args.figure, "files": [str(f) for f in files]}))


COMMANDS = {
    "static-density": cmd_static_density,
    "static-sample": cmd_static_sample,
    "marginal": cmd_marginal,
    "dynamic": cmd_dynamic,
    "compare": cmd_compare,
    "entropy-dist": cmd_entropy_dist,
    "project": cmd_project,
    "reproduce-figure": cmd_reproduce_figure,
}


def _fail(exc: Exception, code: int) -> int:
    cls = getattr(exc, "error_class", "invalid-argument" if code == EXIT_USAGE else "error")
    print(json.dumps({"error_class": cls, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _resolve_argv(argv)
    except InvalidArgument as exc:
        return _fail(exc, EXIT_USAGE)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with np.errstate(all="ignore"):
            COMMANDS[args.command](args)
    except (InvalidArgument, Unsupported) as exc:
        return _fail(exc, EXIT_USAGE)
    except EnsembleError as exc:
        return _fail(exc, EXIT_NUMERICAL)
    return 0


if __name__ == "__main__":
    sys.exit(main())

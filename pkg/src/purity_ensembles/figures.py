"""Data files for the standard set of six figures.

1  chart density at P = 0.4 for m = 16 and m = 4, boundary conics, stationary points
2  global-model marginals of lam1 and lam2 against the exact curves
3  coupling-model marginal of lam1 for several couplings
4  entropy distribution at fixed purity for several environment sizes
5  Kolmogorov summary of all dynamical models, with the two-qubit models
   across initial entanglement
6  chart density at fixed entropy S = 1.5 bits, m = 8

Every writer returns the list of files it produced.  ``scale`` picks a preset
budget: ``quick`` for smoke runs, ``desk`` for a few minutes per figure.
"""
from __future__ import annotations

import math
import warnings
from pathlib import Path

import numpy as np

from .analysis import Histogram1D, Histogram2D, compare_ensembles, entropy_distribution_at_fixed_purity
from .dynamics import (
    COMMON,
    COUPLING,
    GLOBAL,
    SPECTATOR,
    HamiltonianModel,
    InitialStateSpec,
    run_dynamic_ensemble,
)
from .errors import InvalidArgument
from .io import write_csv, write_json, write_manifest
from .marginals import LAMBDA1, LAMBDA2, marginal
from .static import ENTROPY, StaticEnsembleSpec, boundary_conics, point_grid, stationary_points

SCALES = {
    "quick": {"grid": 41, "N": 200, "curve": 48, "entropy_N": 2000, "bins": 20,
              "chain": {"burn_in": 2000, "chains": 200}},
    "desk": {"grid": 200, "N": 10_000, "curve": 256, "entropy_N": 100_000, "bins": 50,
             "chain": {}},
}
FIGURES = (1, 2, 3, 4, 5, 6)


def _budget(scale: str) -> dict:
    if scale not in SCALES:
        raise InvalidArgument(f"unknown scale {scale!r}; expected one of {sorted(SCALES)}")
    return SCALES[scale]


def _grid_rows(grid, dens):
    for i, x in enumerate(grid):
        for j, y in enumerate(grid):
            yield x, y, dens[i, j]


def _write_grid(path, spec, resolution, manifest):
    grid, dens = point_grid(spec, resolution)
    write_csv(path, ["lambda1", "lambda2", "density"], _grid_rows(grid, dens))
    write_manifest(path, manifest)
    return path


def figure1(out: Path, scale: str, seed: int = 0, workers=None) -> list[Path]:
    b = _budget(scale)
    P = 0.4
    files = []
    for m in (16, 4):
        spec = StaticEnsembleSpec(n=4, m=m, value=P)
        files.append(_write_grid(out / f"fig1_density_m{m}.csv", spec, b["grid"],
                                 {"figure": 1, "m": m, "P": P, "grid": b["grid"],
                                  "jacobian_power": spec.jacobian_power}))
    rows = []
    for conic in boundary_conics(P):
        for x, y in conic.sample(361):
            rows.append((conic.label, x, y))
    path = out / "fig1_conics.csv"
    write_csv(path, ["conic", "lambda1", "lambda2"], rows)
    write_manifest(path, {"figure": 1, "P": P})
    files.append(path)
    path = out / "fig1_stationary_points.csv"
    write_csv(path, ["label", "lambda1", "lambda2", "physical", "interior"],
              [(s.label, *s.point, s.physical, s.interior) for s in stationary_points(P)])
    write_manifest(path, {"figure": 1, "P": P})
    files.append(path)
    return files


def _marginal_files(out, stem, spectra, m, P, which_list, b, meta):
    files = []
    for which in which_list:
        curve = marginal(which, m, P, resolution=b["curve"])
        col = 0 if which == LAMBDA1 else 1
        edges = np.linspace(*curve.support, b["bins"] + 1)
        hist = Histogram1D.from_samples(spectra[:, col], edges)
        path = out / f"{stem}_{which}.csv"
        write_csv(path, ["bin_left", "bin_right", "sample_density", "exact_density"],
                  zip(edges[:-1], edges[1:], hist.density,
                      curve.bin_probabilities(edges) / np.diff(edges)))
        report = compare_ensembles(curve, spectra, which, edges=edges, seed=meta["seed"])
        write_manifest(path, {**meta, "which": which, "K": report.K, "error_bar": report.error_bar})
        files.append(path)
    return files


def _dynamic(model, theta, P, N, seed, workers):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return run_dynamic_ensemble(model, InitialStateSpec(theta), P, N, seed=seed, workers=workers)


def figure2(out: Path, scale: str, seed: int = 0, workers=None) -> list[Path]:
    b = _budget(scale)
    files = []
    for m in (8, 16):
        for P in (0.4, 0.8):
            ens = _dynamic(HamiltonianModel(GLOBAL, m), 0.0, P, b["N"], seed, workers)
            meta = {"figure": 2, **ens.manifest}
            files += _marginal_files(out, f"fig2_global_m{m}_P{P}", ens.spectra, m, P,
                                     (LAMBDA1, LAMBDA2), b, meta)
    return files


def figure3(out: Path, scale: str, seed: int = 0, workers=None) -> list[Path]:
    b = _budget(scale)
    files = []
    m = 8
    for P in (0.4, 0.8):
        for eps in (0.01, 0.1, 1.0):
            ens = _dynamic(HamiltonianModel(COUPLING, m, eps), 0.0, P, b["N"], seed, workers)
            meta = {"figure": 3, **ens.manifest}
            files += _marginal_files(out, f"fig3_coupling_eps{eps}_P{P}", ens.spectra, m, P,
                                     (LAMBDA1,), b, meta)
    return files


def figure4(out: Path, scale: str, seed: int = 0, workers=None) -> list[Path]:
    b = _budget(scale)
    files = []
    for P in (0.4, 0.6, 0.8):
        for m in (8, 16, 32):
            dist = entropy_distribution_at_fixed_purity(P, m, b["entropy_N"], bins=b["bins"], seed=seed,
                                                        **b["chain"])
            h = dist.histogram
            path = out / f"fig4_entropy_P{P}_m{m}.csv"
            write_csv(path, ["bin_left", "bin_right", "density"], zip(h.edges[:-1], h.edges[1:], h.density))
            write_manifest(path, {"figure": 4, "P": P, "m": m, "N": b["entropy_N"], "seed": seed,
                                  "mean": dist.mean, "std": dist.std, "log_base": "e"})
            files.append(path)
    return files


FIG5_CASES = (
    [(GLOBAL, m, 1.0, 0.0) for m in (4, 8, 16)]
    + [(COUPLING, 8, eps, 0.0) for eps in (0.01, 0.1, 1.0)]
    + [(kind, 8, 1.0, theta) for kind in (SPECTATOR, COMMON)
       for theta in (0.0, 0.2, math.pi / 8, math.pi / 4)]
)


def figure5(out: Path, scale: str, seed: int = 0, workers=None) -> list[Path]:
    b = _budget(scale)
    P = 0.8
    rows = []
    files = []
    curves = {}
    for kind, m, eps, theta in FIG5_CASES:
        ens = _dynamic(HamiltonianModel(kind, m, eps), theta, P, b["N"], seed, workers)
        if m not in curves:
            curves[m] = marginal(LAMBDA1, m, P, resolution=b["curve"])
        rep = compare_ensembles(curves[m], ens.spectra, LAMBDA1, bins=b["bins"], seed=seed)
        rows.append((kind, m, eps, theta, P, len(ens.spectra), ens.discarded, rep.K, rep.error_bar))
        if kind in (SPECTATOR, COMMON):
            # sorted (lam1, lam2) histogram, the entanglement panels
            edges = np.linspace(0.0, 0.26, b["bins"] + 1)
            h = Histogram2D.from_samples(ens.spectra[:, :2], edges, edges)
            path = out / f"fig5_{kind}_theta{theta:.4f}_2d.csv"
            cx = (edges[:-1] + edges[1:]) / 2
            write_csv(path, ["lambda1", "lambda2", "density"], _grid_rows(cx, h.density))
            write_manifest(path, {"figure": 5, **ens.manifest})
            files.append(path)
    path = out / "fig5_kolmogorov.csv"
    write_csv(path, ["model", "m", "eps", "theta", "P", "N", "discarded", "K", "error_bar"], rows)
    write_manifest(path, {"figure": 5, "P": P, "N": b["N"], "bins": b["bins"], "seed": seed,
                          "variable": LAMBDA1})
    files.append(path)
    return files


def figure6(out: Path, scale: str, seed: int = 0, workers=None) -> list[Path]:
    b = _budget(scale)
    # S = 1.5 exceeds ln 4, so the entropy is read in bits
    spec = StaticEnsembleSpec(n=4, m=8, constraint=ENTROPY, value=1.5, log_base=2.0)
    path = out / "fig6_entropy_density_m8.csv"
    return [_write_grid(path, spec, b["grid"], {"figure": 6, "m": 8, "S": 1.5, "log_base": 2,
                                                 "grid": b["grid"],
                                                 "jacobian_power": spec.jacobian_power})]


WRITERS = {1: figure1, 2: figure2, 3: figure3, 4: figure4, 5: figure5, 6: figure6}


def reproduce_figure(number: int, out_dir, scale: str = "desk", seed: int = 0,
                     workers=None) -> list[Path]:
    if number not in WRITERS:
        raise InvalidArgument(f"figure must be one of {FIGURES}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = WRITERS[number](out, scale, seed, workers)
    write_json(out / f"fig{number}_index.json",
               {"figure": number, "scale": scale, "seed": seed, "files": [p.name for p in files]})
    return files

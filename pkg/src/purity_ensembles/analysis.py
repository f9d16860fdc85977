"""Histograms, Kolmogorov distances and ensemble comparisons.

The Kolmogorov distance here is half the L1 distance between two normalized
densities, ``K = 1/2 sum |f - g| * bin_volume``, i.e. the total-variation
distance of the binned distributions.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import EmptyEnsemble, InvalidArgument
from .marginals import LAMBDA1, LAMBDA2, MarginalCurve
from .mcmc import ChainConfig, run_chain
from .quantum import entropy_terms
from .static import StaticEnsembleSpec, chart_extent, density_grid

CHART = "chart"
VARIABLES = (LAMBDA1, LAMBDA2, CHART)
DEFAULT_BINS = 50
DEFAULT_REPLICATES = 8


def _uniform_edges(edges) -> np.ndarray:
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise InvalidArgument("bin edges must be a strictly increasing 1D array")
    return edges


@dataclass
class Histogram1D:
    edges: np.ndarray
    counts: np.ndarray
    total: int

    @classmethod
    def from_samples(cls, samples, edges) -> "Histogram1D":
        edges = _uniform_edges(edges)
        samples = np.asarray(samples, dtype=float).ravel()
        if samples.size == 0:
            raise EmptyEnsemble("no samples to histogram")
        counts, _ = np.histogram(samples, bins=edges)
        return cls(edges, counts, int(samples.size))

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return (self.edges[:-1] + self.edges[1:]) / 2

    @property
    def probabilities(self) -> np.ndarray:
        # out-of-range samples keep their share of the mass as a deficit
        return self.counts / self.total

    @property
    def density(self) -> np.ndarray:
        return self.probabilities / self.widths

    def merge(self, other: "Histogram1D") -> "Histogram1D":
        if not np.array_equal(self.edges, other.edges):
            raise InvalidArgument("cannot merge histograms with different edges")
        return Histogram1D(self.edges, self.counts + other.counts, self.total + other.total)


@dataclass
class Histogram2D:
    edges_x: np.ndarray
    edges_y: np.ndarray
    counts: np.ndarray
    total: int

    @classmethod
    def from_samples(cls, xy, edges_x, edges_y) -> "Histogram2D":
        xy = np.asarray(xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise InvalidArgument("2D histogram needs an (N, 2) array")
        if len(xy) == 0:
            raise EmptyEnsemble("no samples to histogram")
        ex, ey = _uniform_edges(edges_x), _uniform_edges(edges_y)
        counts, _, _ = np.histogram2d(xy[:, 0], xy[:, 1], bins=[ex, ey])
        return cls(ex, ey, counts.astype(np.int64), len(xy))

    @property
    def volumes(self) -> np.ndarray:
        return np.outer(np.diff(self.edges_x), np.diff(self.edges_y))

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.total

    @property
    def density(self) -> np.ndarray:
        return self.probabilities / self.volumes

    def merge(self, other: "Histogram2D") -> "Histogram2D":
        if not (np.array_equal(self.edges_x, other.edges_x)
                and np.array_equal(self.edges_y, other.edges_y)):
            raise InvalidArgument("cannot merge histograms with different edges")
        return Histogram2D(self.edges_x, self.edges_y, self.counts + other.counts,
                           self.total + other.total)


def kolmogorov_distance(f, g, volumes=None) -> float:
    """``1/2 sum |f - g| * volume`` for densities on a common binning.

    ``f`` and ``g`` may be histograms (their densities and bin volumes are
    used) or plain arrays; with arrays and no ``volumes`` they are taken as
    bin probabilities.
    """
    vols = []
    arrays = []
    for h in (f, g):
        if isinstance(h, Histogram1D):
            arrays.append(h.density)
            vols.append(h.widths)
        elif isinstance(h, Histogram2D):
            arrays.append(h.density)
            vols.append(h.volumes)
        else:
            arrays.append(np.asarray(h, dtype=float))
    if len(vols) == 2 and not np.allclose(vols[0], vols[1], rtol=0, atol=1e-15):
        raise InvalidArgument("densities live on different binnings")
    a, b = arrays
    if a.shape != b.shape:
        raise InvalidArgument(f"binning mismatch: {a.shape} vs {b.shape}")
    if volumes is None:
        volumes = vols[0] if vols else np.ones_like(a)
    volumes = np.asarray(volumes, dtype=float)
    if volumes.shape != a.shape:
        raise InvalidArgument("bin volumes do not match the densities")
    diff = np.sum(np.abs(a - b) * volumes)
    mass = np.sum((a + b) * volumes)
    if abs(mass - 2.0) <= 1e-9 and mass > 0:
        # both normalized: dividing by the summed mass instead of 2 gives
        # exactly 1 on disjoint supports, where |a - b| == a + b elementwise
        return float(diff / mass)
    return float(0.5 * diff)


def sampling_error_bar(reference, N: int, replicates: int = DEFAULT_REPLICATES, seed: int = 0,
                       sampler=None, edges=None) -> float:
    """Mean K between ``reference`` bin probabilities and ``replicates``
    histograms of ``N`` samples.

    By default the samples are drawn i.i.d. from the binned reference
    (multinomial counts).  With ``sampler(N, rng)`` and ``edges`` the draws
    come from the given sampler instead, so its own binning and correlation
    effects enter the estimate.
    """
    if N < 1:
        raise InvalidArgument("N must be positive")
    if replicates < 2:
        raise InvalidArgument("need at least two replicates")
    ref = np.asarray(reference, dtype=float)
    if np.any(ref < 0) or not np.isclose(ref.sum(), 1.0, atol=1e-9):
        raise InvalidArgument("reference must be normalized bin probabilities")
    rng = np.random.default_rng(seed)
    dists = []
    for _ in range(replicates):
        if sampler is None:
            probs = rng.multinomial(N, ref.ravel() / ref.sum()).reshape(ref.shape) / N
        else:
            if edges is None:
                raise InvalidArgument("a sampler needs the bin edges")
            draw = np.asarray(sampler(N, rng))
            if ref.ndim == 1:
                probs = Histogram1D.from_samples(draw, edges).probabilities
            else:
                probs = Histogram2D.from_samples(draw, *edges).probabilities
        dists.append(0.5 * np.abs(probs - ref).sum())
    return float(np.mean(dists))


@dataclass
class EntropyDistribution:
    samples: np.ndarray
    histogram: Histogram1D
    log_base: float

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def std(self) -> float:
        return float(np.std(self.samples))


def entropy_distribution_at_fixed_purity(P: float, m: int, N: int, bins: int = DEFAULT_BINS,
                                         seed: int = 0, jacobian_power: int = 1,
                                         log_base: float = math.e,
                                         **chain_options) -> EntropyDistribution:
    """Histogram of the von Neumann entropy over the fixed-purity ensemble (n = 4).

    ``chain_options`` (burn_in, chains, ...) are passed to the sampler.
    """
    if N < 1 or bins < 1:
        raise InvalidArgument("N and bins must be positive")
    if not (0.25 <= P <= 1.0):
        raise InvalidArgument(f"purity {P} outside [1/4, 1]")
    if P == 1.0 or P == 0.25:
        # single spectrum: pure state or maximally mixed
        value = 0.0 if P == 1.0 else math.log(4) / math.log(log_base)
        samples = np.full(N, value)
    else:
        spec = StaticEnsembleSpec(n=4, m=m, value=P, jacobian_power=jacobian_power)
        spectra = run_chain(ChainConfig(spec, total_samples=N, seed=seed, **chain_options)).spectra
        samples = entropy_terms(spectra).sum(axis=1) / math.log(log_base)
    lo, hi = float(samples.min()), float(samples.max())
    pad = 0.01 * (hi - lo) if hi > lo else 1e-6
    edges = np.linspace(lo - pad, hi + pad, bins + 1)
    return EntropyDistribution(samples, Histogram1D.from_samples(samples, edges), log_base)


def relabel_to_chart(spectra: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Free chart coordinates of sorted spectra under a uniformly random labelling."""
    spectra = np.asarray(spectra, dtype=float)
    perm = np.argsort(rng.random(spectra.shape), axis=-1)
    return np.take_along_axis(spectra, perm, axis=-1)[:, :2]


@dataclass
class ComparisonReport:
    K: float
    error_bar: float
    N: int
    variable: str
    convention: str
    bins: dict
    reference: dict = field(default_factory=dict)
    sample: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _column(variable: str) -> int:
    return {LAMBDA1: 0, LAMBDA2: 1}[variable]


def _sample_values(x, variable: str, rng) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or len(x) == 0:
        raise EmptyEnsemble("sample set is empty")
    if variable == CHART:
        return x if x.shape[1] == 2 else relabel_to_chart(x, rng)
    return x[:, _column(variable)]


def compare_ensembles(reference, sample, variable: str = LAMBDA1, bins: int = DEFAULT_BINS,
                      edges=None, replicates: int = DEFAULT_REPLICATES, seed: int = 0,
                      reference_meta: dict | None = None,
                      sample_meta: dict | None = None) -> ComparisonReport:
    """K between a reference (exact curve, exact 2D spec, or samples) and a sample set.

    ``lambda1``/``lambda2`` use sorted eigenvalues; ``chart`` compares the
    unordered (lam1, lam2) plane.  Sorted 4-column spectra entering a chart
    comparison are relabelled uniformly at random.
    """
    if variable not in VARIABLES:
        raise InvalidArgument(f"unknown variable {variable!r}")
    rng = np.random.default_rng(seed)
    ys = _sample_values(sample, variable, rng)
    N = len(ys)

    if variable == CHART:
        if edges is None:
            if isinstance(reference, StaticEnsembleSpec):
                top = chart_extent(reference.value)
            else:
                top = float(max(np.max(ys), np.max(_sample_values(reference, variable, rng))))
            edges = (np.linspace(0.0, top * 1.0001, bins + 1),) * 2
        ex, ey = (_uniform_edges(e) for e in edges)
        if isinstance(reference, StaticEnsembleSpec):
            ref = density_grid(reference, ex, ey) * np.outer(np.diff(ex), np.diff(ey))
            ref_desc = {"kind": "exact", **asdict(reference)}
        else:
            ref = Histogram2D.from_samples(_sample_values(reference, variable, rng), ex, ey).probabilities
            ref_desc = {"kind": "samples", "N": int(len(reference))}
        ref = ref / ref.sum()
        hist = Histogram2D.from_samples(ys, ex, ey).probabilities
        binning = {"x": [float(ex[0]), float(ex[-1]), len(ex) - 1],
                   "y": [float(ey[0]), float(ey[-1]), len(ey) - 1]}
        convention = "unordered (lambda1, lambda2) chart"
    else:
        if edges is None:
            if isinstance(reference, MarginalCurve):
                lo, hi = reference.support
            else:
                both = np.concatenate([ys, _sample_values(reference, variable, rng)])
                lo, hi = float(both.min()), float(both.max())
                pad = 0.01 * (hi - lo)
                lo, hi = lo - pad, hi + pad
            edges = np.linspace(lo, hi, bins + 1)
        edges = _uniform_edges(edges)
        if isinstance(reference, MarginalCurve):
            ref = reference.bin_probabilities(edges)
            ref_desc = {"kind": "exact", "which": reference.which, "m": reference.m,
                        "P": reference.P, "jacobian_power": reference.jacobian_power}
        else:
            ref = Histogram1D.from_samples(_sample_values(reference, variable, rng), edges).probabilities
            ref_desc = {"kind": "samples", "N": int(len(reference))}
        ref = ref / ref.sum()
        hist = Histogram1D.from_samples(ys, edges).probabilities
        binning = {"x": [float(edges[0]), float(edges[-1]), len(edges) - 1]}
        convention = "sorted eigenvalues"

    K = float(0.5 * np.abs(hist - ref).sum())
    err = sampling_error_bar(ref, N, replicates=replicates, seed=seed + 1)
    ref_desc.update(reference_meta or {})
    return ComparisonReport(K, err, N, variable, convention, binning, ref_desc,
                            dict(sample_meta or {}, N=N))

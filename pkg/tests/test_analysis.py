import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from purity_ensembles.analysis import (
    CHART,
    Histogram1D,
    Histogram2D,
    compare_ensembles,
    entropy_distribution_at_fixed_purity,
    kolmogorov_distance,
    relabel_to_chart,
    sampling_error_bar,
)
from purity_ensembles.errors import EmptyEnsemble, InvalidArgument
from purity_ensembles.marginals import marginal_lambda1
from purity_ensembles.static import StaticEnsembleSpec, chart_extent, density_grid

EXACT_16_04_ERROR_BAR_1E6 = 0.00787751620914935


def _normalized(v):
    v = np.asarray(v, dtype=float)
    return v / v.sum()


prob_vectors = arrays(float, 12, elements=st.floats(0, 1)).filter(lambda v: v.sum() > 1e-3).map(_normalized)


def test_histograms_normalized(rng):
    x = rng.normal(size=5000)
    edges = np.linspace(-5, 5, 41)
    h = Histogram1D.from_samples(x, edges)
    assert (h.density * h.widths).sum() == pytest.approx(1, abs=1e-12)
    h2 = Histogram2D.from_samples(rng.random((3000, 2)), np.linspace(0, 1, 11), np.linspace(0, 1, 6))
    assert (h2.density * h2.volumes).sum() == pytest.approx(1, abs=1e-12)
    merged = h.merge(Histogram1D.from_samples(rng.normal(size=100), edges))
    assert merged.total == 5100
    with pytest.raises(InvalidArgument):
        h.merge(Histogram1D.from_samples(x, np.linspace(-5, 5, 11)))


def test_kolmogorov_basic_values():
    f = np.array([0.5, 0.5, 0.0, 0.0])
    g = np.array([0.0, 0.0, 0.3, 0.7])
    assert kolmogorov_distance(f, f) == 0.0
    assert kolmogorov_distance(f, g) == 1.0
    assert kolmogorov_distance(f, np.zeros(4)) == 0.5
    with pytest.raises(InvalidArgument):
        kolmogorov_distance(f, np.ones(3) / 3)


def test_kolmogorov_with_densities(rng):
    edges = np.array([0.0, 0.1, 0.5, 1.0])
    a = Histogram1D.from_samples(rng.random(1000), edges)
    assert kolmogorov_distance(a, a) == 0.0
    b = Histogram1D.from_samples(rng.random(1000) * 0.1, edges)
    assert 0 <= kolmogorov_distance(a, b) <= 1


@given(prob_vectors, prob_vectors, prob_vectors)
def test_kolmogorov_metric(f, g, h):
    k = kolmogorov_distance
    assert k(f, g) >= 0
    assert k(f, g) == k(g, f)
    assert k(f, h) <= k(f, g) + k(g, h) + 1e-15
    assert k(f, g) <= 1 + 1e-15


def test_error_bar_decreases_with_N():
    ref = _normalized(np.arange(1, 41))
    bars = [sampling_error_bar(ref, N, replicates=16, seed=1) for N in (10**3, 10**4, 10**5, 10**6, 10**7)]
    assert all(a > b for a, b in zip(bars, bars[1:]))
    assert bars[-1] < 1e-3


def test_error_bar_regression_baseline():
    spec = StaticEnsembleSpec(m=16, value=0.4)
    e = np.linspace(0, chart_extent(0.4) * 1.0001, 51)
    ref = density_grid(spec, e, e) * np.outer(np.diff(e), np.diff(e))
    bar = sampling_error_bar(ref / ref.sum(), 10**6, seed=0)
    assert bar == pytest.approx(EXACT_16_04_ERROR_BAR_1E6, rel=1e-6)


def test_error_bar_with_sampler(rng):
    edges = np.linspace(0, 1, 21)
    ref = np.full(20, 0.05)
    bar = sampling_error_bar(ref, 10_000, sampler=lambda n, r: r.random(n), edges=edges)
    assert bar == pytest.approx(sampling_error_bar(ref, 10_000), rel=0.3)
    with pytest.raises(InvalidArgument):
        sampling_error_bar(ref, 100, sampler=lambda n, r: r.random(n))
    with pytest.raises(InvalidArgument):
        sampling_error_bar(ref * 2, 100)


def test_independent_draws_fall_within_error_bars():
    ref = _normalized(np.exp(-np.linspace(-2, 2, 50) ** 2))
    rng = np.random.default_rng(8)
    N = 10**5
    bar = sampling_error_bar(ref, N, seed=9)
    inside = 0
    for _ in range(20):
        a, b = (rng.multinomial(N, ref) / N for _ in range(2))
        inside += kolmogorov_distance(a, b) <= 2 * bar
    assert inside >= 19


def test_entropy_distribution_deltas():
    pure = entropy_distribution_at_fixed_purity(1.0, 8, 100)
    assert pure.std == 0 and pure.mean == 0
    mixed = entropy_distribution_at_fixed_purity(0.25, 8, 100)
    assert mixed.mean == pytest.approx(math.log(4), abs=1e-15)
    bits = entropy_distribution_at_fixed_purity(0.25, 8, 10, log_base=2)
    assert bits.mean == pytest.approx(2.0, abs=1e-15)


def test_entropy_distribution_sampled():
    d = entropy_distribution_at_fixed_purity(0.6, 8, 4000, bins=20, burn_in=2000, chains=200, seed=2)
    assert len(d.samples) == 4000
    assert 0 < d.mean < math.log(4)
    assert (d.histogram.density * d.histogram.widths).sum() == pytest.approx(1, abs=1e-12)


def test_relabel_to_chart_is_uniform(rng):
    spectra = np.tile([0.1, 0.2, 0.3, 0.4], (40_000, 1))
    free = relabel_to_chart(spectra, rng)
    counts = np.unique(free[:, 0], return_counts=True)[1]
    assert len(counts) == 4
    assert np.all(np.abs(counts / 40_000 - 0.25) < 0.01)


def test_split_half_self_comparison(rng):
    x = np.sort(rng.dirichlet(np.ones(4), size=20_000), axis=1)
    rep = compare_ensembles(x[:10_000], x[10_000:], "lambda1", bins=30)
    assert rep.K <= 2 * rep.error_bar * math.sqrt(2)


def test_comparison_symmetric(rng):
    a = np.sort(rng.dirichlet(np.ones(4), size=3000), axis=1)
    b = np.sort(rng.dirichlet(2 * np.ones(4), size=3000), axis=1)
    edges = np.linspace(0, 0.3, 31)
    assert compare_ensembles(a, b, edges=edges).K == compare_ensembles(b, a, edges=edges).K
    assert compare_ensembles(a, b, bins=25).K == compare_ensembles(b, a, bins=25).K


def test_report_schema(rng):
    curve = marginal_lambda1(8, 0.6, resolution=65)
    lo, hi = curve.support
    x = np.sort(rng.uniform(lo, hi, (500, 4)), axis=1)
    rep = compare_ensembles(curve, x, bins=10, sample_meta={"source": "test"})
    d = json.loads(rep.to_json())
    for key in ("K", "error_bar", "N", "variable", "convention", "bins", "reference", "sample"):
        assert key in d
    assert d["reference"]["kind"] == "exact"
    assert d["sample"]["source"] == "test"
    assert d["K"] >= 0 and d["error_bar"] >= 0


def test_chart_comparison_against_exact(rng):
    spec = StaticEnsembleSpec(m=16, value=0.4)
    rep = compare_ensembles(spec, np.array([[0.1, 0.12], [0.14, 0.2]]), CHART, bins=10)
    assert rep.convention.startswith("unordered")
    assert 0 < rep.K <= 1


def test_empty_and_bad_inputs():
    with pytest.raises(EmptyEnsemble):
        compare_ensembles(np.ones((3, 4)) / 4, np.empty((0, 4)))
    with pytest.raises(InvalidArgument):
        compare_ensembles(np.ones((3, 4)) / 4, np.ones((3, 4)) / 4, variable="lambda7")

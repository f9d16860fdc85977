import math

import numpy as np
import pytest
from scipy import integrate

from purity_ensembles import marginals
from purity_ensembles.analysis import compare_ensembles
from purity_ensembles.errors import InvalidArgument, NumericalFailure
from purity_ensembles.marginals import (
    LAMBDA1,
    LAMBDA2,
    lambda1_limits,
    lambda2_limits,
    marginal,
    marginal_lambda1,
    marginal_lambda2,
)
from purity_ensembles.static import StaticEnsembleSpec, chart_points, log_density, log_normalization

CASES = [(8, 0.4), (16, 0.8), (6, 0.3), (8, 0.8)]


@pytest.fixture(scope="module")
def curves():
    return {(w, m, P): marginal(w, m, P, resolution=257) for w in (LAMBDA1, LAMBDA2) for m, P in CASES}


@pytest.mark.parametrize("m, P", CASES)
@pytest.mark.parametrize("which", [LAMBDA1, LAMBDA2])
def test_curve_normalized_and_nonnegative(curves, which, m, P):
    c = curves[(which, m, P)]
    assert np.all(c.densities >= 0)
    assert integrate.trapezoid(c.densities, c.abscissas) == pytest.approx(1, abs=1e-6)
    lo, hi = (lambda1_limits if which == LAMBDA1 else lambda2_limits)(P)
    assert c.support == pytest.approx((lo, hi), abs=1e-15)
    assert c.bin_probabilities(np.linspace(lo, hi, 11)).sum() == pytest.approx(1, abs=1e-9)


def _ordered_range(x, P, which, m):
    """Values of the other free coordinate keeping lam1 <= lam2 <= lam3 <= lam4,
    located numerically from the recovered tail."""
    spec = StaticEnsembleSpec(m=m, value=P)

    def margins(y):
        y = np.atleast_1d(y)
        xs = np.full_like(y, x)
        free = np.stack([xs, y] if which == LAMBDA1 else [y, xs], axis=-1)
        lam = chart_points(free, spec)
        out = np.min(np.diff(lam, axis=-1), axis=-1)
        return np.where(np.all(np.isfinite(lam), axis=-1), out, -1.0)

    ys = np.linspace(0, 1, 4001)
    idx = np.nonzero(margins(ys) >= 0)[0]
    if len(idx) == 0:
        return None

    def edge(a, b):
        # margins can jump to -1 where the tail stops existing; bisect on the sign
        for _ in range(60):
            c = (a + b) / 2
            if (margins(c)[0] >= 0) == (margins(a)[0] >= 0):
                a = c
            else:
                b = c
        return (a + b) / 2

    lo = ys[idx[0]] if idx[0] == 0 else edge(ys[idx[0]], ys[idx[0] - 1])
    hi = ys[idx[-1]] if idx[-1] == len(ys) - 1 else edge(ys[idx[-1]], ys[idx[-1] + 1])
    return lo, hi


def _ordered_inner(x, P, which, spec, shift):
    rng_ = _ordered_range(x, P, which, spec.m)
    if rng_ is None or rng_[1] <= rng_[0]:
        return 0.0

    def f(y):
        pt = np.array([x, y] if which == LAMBDA1 else [y, x])
        return math.exp(float(log_density(pt, spec)) - shift)

    return integrate.quad(f, *rng_, epsabs=1e-13, epsrel=1e-10, limit=400)[0]


@pytest.mark.parametrize("which", [LAMBDA1, LAMBDA2])
@pytest.mark.parametrize("m, P", [(8, 0.4), (16, 0.8)])
def test_marginal_matches_integrated_chart_density(which, m, P):
    spec = StaticEnsembleSpec(m=m, value=P)
    shift = log_normalization(spec)
    curve = marginal(which, m, P, resolution=1025)
    lo, hi = curve.support
    z = integrate.quad(lambda x: _ordered_inner(x, P, which, spec, shift), lo, hi,
                       epsabs=1e-10, limit=100)[0]
    for i in (100, 300, 500, 700, 900):
        x = curve.abscissas[i]
        assert curve.densities[i] == pytest.approx(_ordered_inner(x, P, which, spec, shift) / z, abs=1e-4)


def test_ordered_cell_is_one_twelfth_for_symmetric_density():
    # with k = -1 the chart density is symmetric under relabelling the tail
    m, P = 8, 0.4
    spec = StaticEnsembleSpec(m=m, value=P, jacobian_power=-1)
    shift = log_normalization(spec)
    lo, hi = lambda1_limits(P)
    z = integrate.quad(lambda x: _ordered_inner(x, P, LAMBDA1, spec, shift), lo, hi,
                       epsabs=1e-10, limit=100)[0]
    assert 12 * z == pytest.approx(1.0, rel=1e-5)


def test_lambda2_upper_limit_below_one_third():
    P = 0.3
    lo, hi = lambda2_limits(P)
    L = (3 + math.sqrt(12 * P - 3)) / 12
    witness = np.array([1 - 3 * L, L, L, L])
    assert np.all(np.diff(witness) >= 0)
    assert (witness ** 2).sum() == pytest.approx(P, abs=1e-15)
    assert hi == pytest.approx(witness[1], abs=1e-15)
    # the alternative closed form (3 - sqrt(0.6))/12 is exceeded by the witness
    assert witness[1] > (3 - math.sqrt(0.6)) / 12 + 0.1


@pytest.mark.parametrize("P", [0.3, 1 / 3, 0.4, 0.8])
def test_limits_contain_brute_force_extremes(P):
    rng = np.random.default_rng(3)
    spec = StaticEnsembleSpec(m=8, value=P)
    pts = chart_points(rng.uniform(0, 0.6, (400_000, 2)), spec)
    ok = np.all(np.isfinite(pts), axis=1) & np.all(pts >= 0, axis=1)
    lam = np.sort(pts[ok], axis=1)
    l1 = lambda1_limits(P)
    l2 = lambda2_limits(P)
    assert l1[0] - 1e-12 <= lam[:, 0].min() and lam[:, 0].max() <= l1[1] + 1e-12
    assert l2[0] - 1e-12 <= lam[:, 1].min() and lam[:, 1].max() <= l2[1] + 1e-12
    # and the limits are nearly attained
    assert lam[:, 0].max() > l1[1] - 5e-3
    assert lam[:, 1].max() > l2[1] - 5e-3


def test_bad_arguments():
    with pytest.raises(InvalidArgument):
        marginal_lambda1(3, 0.4)
    with pytest.raises(InvalidArgument):
        marginal_lambda2(8, 0.25)
    with pytest.raises(InvalidArgument):
        marginal("lambda3", 8, 0.4)


def test_quadrature_failure_is_reported(monkeypatch):
    def broken(*args, **kwargs):
        return float("nan"), 1.0, {"neval": 21}, 1, "no convergence"
    monkeypatch.setattr(marginals.integrate, "quad", broken)
    with pytest.raises(NumericalFailure, match="evaluations=21"):
        marginal_lambda1(8, 0.4, resolution=5)


def test_haar_states_in_a_purity_shell_follow_k_minus_one():
    rng = np.random.default_rng(21)
    m, P = 6, 0.4
    v = rng.standard_normal((200_000, m, 4)) + 1j * rng.standard_normal((200_000, m, 4))
    rho = np.einsum("kec,ked->kcd", v, v.conj())
    rho /= np.trace(rho, axis1=1, axis2=2).real[:, None, None]
    lam = np.linalg.eigvalsh(rho)
    kept = lam[np.abs((lam ** 2).sum(axis=1) - P) < 0.003]
    assert len(kept) > 5000
    reps = {k: compare_ensembles(marginal_lambda1(m, P, resolution=256, jacobian_power=k), kept, bins=20)
            for k in (-1, 1)}
    assert reps[-1].K <= 2 * reps[-1].error_bar
    assert reps[1].K > 3 * reps[1].error_bar

import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from purity_ensembles.errors import InvalidArgument, NonPhysical, NotRealizable, NoSolution, Unsupported
from purity_ensembles.quantum import von_neumann_entropy
from purity_ensembles.static import (
    ENTROPY,
    StaticEnsembleSpec,
    boundary_conics,
    chart_extent,
    chart_points,
    density_grid,
    g_product,
    gaussian_approx_density,
    jacobian_factor,
    log_density,
    log_normalization,
    peak_locations,
    peak_model,
    peak_offsets,
    recover_tail,
    solve_tail_for_entropy,
    stationarity_residuals,
    stationary_points,
    unnormalized_density,
)

SPEC = StaticEnsembleSpec(m=16, value=0.4)
LM = (3 - math.sqrt(1.8)) / 12


# tail recovery ---------------------------------------------------------------

def test_tail_maximally_mixed():
    assert recover_tail([0.25, 0.25], 0.25) == pytest.approx((0.25, 0.25), abs=1e-15)


def test_tail_example_with_sums():
    low, high = recover_tail([0.1, 0.1], 0.4)
    assert low == pytest.approx(0.226795, abs=1e-6)
    assert high == pytest.approx(0.573205, abs=1e-6)
    lam = np.array([0.1, 0.1, low, high])
    assert abs(lam.sum() - 1) < 1e-12
    assert abs((lam ** 2).sum() - 0.4) < 1e-12


def test_tail_not_realizable():
    with pytest.raises(NotRealizable):
        recover_tail([0.4, 0.4], 0.3)


def test_tail_nonphysical_is_distinct():
    # purity near 1 with small free values forces a negative tail entry
    with pytest.raises(NonPhysical):
        recover_tail([0.05, 0.05], 0.95)
    assert not issubclass(NonPhysical, NotRealizable)


def test_jacobian_examples():
    assert jacobian_factor([0.1, 0.1], 0.4) == pytest.approx(2 * (0.573205 - 0.226795), abs=1e-5)
    assert jacobian_factor([0.1, 0.1], 0.4) == pytest.approx(0.692820, abs=1e-6)
    assert jacobian_factor([0.25, 0.25], 0.25) == 0.0
    # (0.1, 0.3, 0.3, 0.3) sits on the outer ellipse
    assert jacobian_factor([0.1, 0.3], 0.01 + 3 * 0.09) < 1e-7


free_points = st.tuples(st.floats(0.0, 0.6), st.floats(0.0, 0.6))
purities = st.floats(0.26, 1.0)


@given(free_points, purities)
def test_tail_round_trip(free, P):
    try:
        low, high = recover_tail(free, P)
    except (NotRealizable, NonPhysical):
        return
    lam = np.array([*free, low, high])
    assert low <= high
    assert abs(lam.sum() - 1) < 1e-12
    assert abs((lam ** 2).sum() - P) < 1e-12


# entropy tail ----------------------------------------------------------------

def test_entropy_tail_trivial_cases():
    low, high = solve_tail_for_entropy(0.0, 0.0, math.log(2))
    assert (low, high) == pytest.approx((0.5, 0.5), abs=1e-10)
    low, high = solve_tail_for_entropy(0.25, 0.25, math.log(4) - 1e-15)
    assert (low, high) == pytest.approx((0.25, 0.25), abs=1e-10)


def test_entropy_tail_residual():
    low, high = solve_tail_for_entropy(0.1, 0.2, 1.2)
    lam = np.array([0.1, 0.2, low, high])
    assert abs(lam.sum() - 1) < 1e-14
    assert abs(von_neumann_entropy(lam) - 1.2) < 1e-10


def test_entropy_tail_no_solution():
    with pytest.raises(NoSolution):
        solve_tail_for_entropy(0.1, 0.2, 0.1)


@given(st.floats(0.0, 0.45), st.floats(0.0, 0.45), st.floats(0.05, 1.38))
def test_entropy_tail_hits_target(l1, l2, S):
    try:
        low, high = solve_tail_for_entropy(l1, l2, S)
    except NoSolution:
        return
    lam = np.array([l1, l2, low, high])
    assert low <= high
    assert abs(von_neumann_entropy(lam) - S) < 1e-10


# peaks -----------------------------------------------------------------------

def test_peak_locations_examples():
    p = peak_locations(4, 0.4)
    assert p.lambda_minus == pytest.approx(LM, abs=1e-15)
    assert p.lambda_minus == pytest.approx(0.1381966, abs=1e-7)
    assert p.lambda_plus == pytest.approx(0.3618034, abs=1e-7)
    assert not p.plus_physical
    q = peak_locations(4, 0.25)
    assert q.lambda_minus == q.lambda_plus == 0.25
    with pytest.raises(InvalidArgument):
        peak_locations(4, 0.2)


@given(st.integers(2, 8), st.floats(0.0, 1.0))
def test_peak_sum(n, t):
    P = 1 / n + t * (1 - 1 / n)
    p = peak_locations(n, P)
    assert abs(p.lambda_minus + p.lambda_plus - 2 / n) < 1e-14


@pytest.mark.parametrize("m", [5, 16, 64])
def test_peak_model_width_positive(m):
    mod = peak_model(4, m, 0.4)
    assert mod.sigma2 > 0
    assert mod.sigma2 == pytest.approx(mod.g_max / (mod.alpha * (m - 4)))


def test_peak_model_needs_more_environment():
    with pytest.raises(Unsupported):
        peak_model(4, 4, 0.4)


def test_peak_model_curvature_matches_finite_differences():
    mod = peak_model(4, 16, 0.4)
    h = 1e-4
    L = mod.lambda_minus
    def g(a, b):
        return float(g_product(np.array([L + a, L + b]), 0.4))
    hxx = (g(h, 0) - 2 * g(0, 0) + g(-h, 0)) / h ** 2
    hxy = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4 * h * h)
    # g ~ g_max - alpha t A t has Hessian -2 alpha A
    assert hxx == pytest.approx(-2 * mod.alpha * mod.A[0, 0], rel=1e-5)
    assert hxy == pytest.approx(-2 * mod.alpha * mod.A[0, 1], rel=1e-5)


def test_gaussian_approx_vanishes_at_peak():
    assert gaussian_approx_density([LM, LM], SPEC) == 0.0


def _local_argmax(fn, centre, half_width, count=401):
    g = np.linspace(-half_width, half_width, count)
    X, Y = np.meshgrid(centre[0] + g, centre[1] + g, indexing="ij")
    v = fn(np.stack([X, Y], axis=-1))
    i = np.unravel_index(np.nanargmax(v), v.shape)
    return np.array([X[i], Y[i]])


def test_peak_offsets_match_grid_search_of_approximation():
    m, P = 64, 0.4
    spec = StaticEnsembleSpec(m=m, value=P)
    mod = peak_model(4, m, P)
    for p in peak_offsets(m, P):
        found = _local_argmax(lambda pts: gaussian_approx_density(pts, spec), p, mod.sigma)
        assert np.linalg.norm(found - p) <= 0.05 * np.linalg.norm(p - mod.lambda_minus)


def test_exact_maxima_approach_offsets_as_m_grows():
    errs = []
    for m in (64, 256, 1024):
        spec = StaticEnsembleSpec(m=m, value=0.4)
        mod = peak_model(4, m, 0.4)
        p = peak_offsets(m, 0.4)[0]
        found = _local_argmax(lambda pts: log_density(pts, spec), p, mod.sigma, 801)
        errs.append(np.linalg.norm(found - p) / np.linalg.norm(p - mod.lambda_minus))
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] < 0.05


def test_gaussian_approximation_improves_with_m():
    ks = []
    for m in (16, 32, 64):
        spec = StaticEnsembleSpec(m=m, value=0.4)
        mod = peak_model(4, m, 0.4)
        g = np.linspace(-6, 6, 241) * mod.sigma
        X, Y = np.meshgrid(mod.lambda_minus + g, mod.lambda_minus + g, indexing="ij")
        pts = np.stack([X, Y], axis=-1)
        ld = log_density(pts, spec)
        a = np.exp(ld - ld.max())
        b = gaussian_approx_density(pts, spec)
        ks.append(0.5 * np.abs(a / a.sum() - b / b.sum()).sum())
    assert ks[0] > ks[1] > ks[2]


# density ---------------------------------------------------------------------

def test_density_zero_on_degeneracy_and_outside():
    assert unnormalized_density([0.2, 0.2], SPEC) == 0.0
    assert unnormalized_density([0.5, 0.5], SPEC) == 0.0
    assert unnormalized_density([-0.01, 0.2], SPEC) == 0.0


def _mp_weight(free, m, P, k=1):
    mpmath.mp.dps = 50
    x, y = (mpmath.mpf(v) for v in free)
    s1, s2 = x + y, x * x + y * y
    root = mpmath.sqrt(2 * (P - s2) - (1 - s1) ** 2)
    lam = [x, y, (1 - s1 - root) / 2, (1 - s1 + root) / 2]
    vdm = mpmath.mpf(1)
    for i in range(4):
        for j in range(i + 1, 4):
            vdm *= (lam[i] - lam[j]) ** 2
    prod = mpmath.fprod(lam) ** (m - 4)
    return (2 * root) ** k * prod * vdm


def test_density_ratio_against_multiprecision():
    P = mpmath.mpf(4) / 10
    lm = (3 - mpmath.sqrt(mpmath.mpf(18) / 10)) / 12
    # the fully degenerate point is a node, so its ratio to any point is 0
    assert unnormalized_density([LM, LM], SPEC) == 0.0
    a = (LM + 0.02, LM)
    b = (LM + 0.02, LM - 0.02)
    ref = _mp_weight((lm + mpmath.mpf(2) / 100, lm), 16, P) / _mp_weight(
        (lm + mpmath.mpf(2) / 100, lm - mpmath.mpf(2) / 100), 16, P)
    ours = unnormalized_density(a, SPEC) / unnormalized_density(b, SPEC)
    assert ours == pytest.approx(float(ref), rel=1e-11)


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_log_density_against_multiprecision(k):
    spec = StaticEnsembleSpec(m=8, value=0.5, jacobian_power=k)
    for pt in [(0.05, 0.1), (0.2, 0.03), (0.01, 0.3)]:
        ref = float(mpmath.log(_mp_weight(pt, 8, mpmath.mpf(1) / 2, k)))
        assert float(log_density(np.array(pt), spec)) == pytest.approx(ref, abs=1e-11)


@given(free_points, st.floats(0.3, 0.9))
def test_density_symmetric_in_free_coordinates(free, P):
    spec = StaticEnsembleSpec(m=12, value=P)
    a = float(log_density(np.array(free), spec))
    b = float(log_density(np.array(free[::-1]), spec))
    if math.isinf(a):
        assert a == b
    else:
        assert a == pytest.approx(b, abs=1e-10)


def test_no_axis_repulsion_when_m_equals_n():
    spec = StaticEnsembleSpec(m=4, value=0.4)
    vals = [unnormalized_density([d, 0.2], spec) for d in (1e-3, 1e-5, 1e-7)]
    assert vals[-1] > 0
    assert vals[-1] == pytest.approx(vals[-2], rel=1e-3)
    spec16 = StaticEnsembleSpec(m=16, value=0.4)
    assert unnormalized_density([1e-7, 0.2], spec16) < 1e-60


def test_chart_points_constraints():
    pts = chart_points(np.array([[0.1, 0.1], [0.05, 0.2]]), SPEC)
    assert np.allclose(pts.sum(axis=1), 1, atol=1e-12)
    assert np.allclose((pts ** 2).sum(axis=1), 0.4, atol=1e-12)


def test_entropy_spec_bounds():
    with pytest.raises(InvalidArgument):
        StaticEnsembleSpec(m=8, constraint=ENTROPY, value=1.5)
    spec = StaticEnsembleSpec(m=8, constraint=ENTROPY, value=1.5, log_base=2)
    pts = chart_points(np.array([0.1, 0.2]), spec)
    assert von_neumann_entropy(pts, base=2) == pytest.approx(1.5, abs=1e-10)


def test_spec_validation():
    with pytest.raises(InvalidArgument):
        StaticEnsembleSpec(value=0.2)
    with pytest.raises(InvalidArgument):
        StaticEnsembleSpec(jacobian_power=2)
    with pytest.raises(Unsupported):
        StaticEnsembleSpec(n=3, constraint=ENTROPY, value=0.5)


# conics and stationary points --------------------------------------------------

@pytest.mark.parametrize("P", [0.3, 0.4, 0.7])
def test_density_vanishes_on_conics(P):
    spec = StaticEnsembleSpec(m=16, value=P)
    grid = np.linspace(0, chart_extent(P), 201)
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    scale = np.exp(np.max(log_density(np.stack([X, Y], axis=-1), spec)))
    for conic in boundary_conics(P):
        pts = conic.sample(200)
        assert np.max(np.abs(conic(pts[:, 0], pts[:, 1]))) < 1e-12
        assert np.max(np.exp(log_density(pts, spec))) < 1e-14 * scale


def test_q3_presence():
    labels = lambda P: [c.label for c in boundary_conics(P)]
    assert "Q3" not in labels(0.3)
    assert "Q3" in labels(0.4)
    q3 = [c for c in boundary_conics(1 / 3) if c.label == "Q3"][0]
    assert np.max(q3.semi_axes) == 0.0
    assert abs(q3(*q3.center)) < 1e-14


def test_conic_semi_axes_match_sampled_curve():
    for c in boundary_conics(0.6):
        semi, dirs = c.axes()
        pts = c.sample(4)
        d = np.linalg.norm(pts - c.center, axis=1)
        assert sorted(np.round(d, 12))[::2] == sorted(np.round(semi, 12))


def test_stationary_points():
    for P in (0.3, 0.4, 0.6, 0.9):
        for s in stationary_points(P):
            if not s.interior:
                outer = [c for c in boundary_conics(P) if c.label == "outer"][0]
                assert abs(outer(*s.point)) < 1e-14
                continue
            assert np.max(np.abs(stationarity_residuals(s.point, P))) < 1e-14
            if s.physical:
                h = 1e-6
                x = np.array(s.point)
                grad = [(g_product(x + h * e, P) - g_product(x - h * e, P)) / (2 * h) for e in np.eye(2)]
                assert np.max(np.abs(grad)) < 1e-9
    flag = {P: {s.label: s.physical for s in stationary_points(P)} for P in (0.3, 0.6)}
    assert flag[0.3]["lambda_plus"]
    assert not flag[0.6]["lambda_plus"]


# normalization -----------------------------------------------------------------

@pytest.mark.parametrize("m, P, frozen", [
    (16, 0.4, -104.269310029702),
    (8, 0.8, -70.5546492424342),
    (4, 0.4, -19.8717382707983),
    (16, 0.3, -99.3720648939512),
])
def test_log_normalization_regression(m, P, frozen):
    assert log_normalization(StaticEnsembleSpec(m=m, value=P)) == pytest.approx(frozen, abs=1e-8)


def test_log_normalization_against_fine_grid():
    spec = StaticEnsembleSpec(m=8, value=0.6)
    g = np.linspace(0, chart_extent(0.6), 1601)
    X, Y = np.meshgrid(g, g, indexing="ij")
    dens = np.exp(log_density(np.stack([X, Y], axis=-1), spec))
    h = g[1] - g[0]
    assert math.log(dens.sum() * h * h) == pytest.approx(log_normalization(spec), abs=2e-3)


def test_density_grid_normalized():
    e = np.linspace(0, chart_extent(0.4), 31)
    d = density_grid(SPEC, e, e)
    assert np.all(d >= 0)
    assert (d * np.outer(np.diff(e), np.diff(e))).sum() == pytest.approx(1, abs=1e-12)

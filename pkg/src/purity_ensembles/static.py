"""Fixed-purity (and fixed-entropy) eigenvalue density on the chart of the
first ``n - 2`` eigenvalues.

A chart point holds the free coordinates ``lam[0:n-2]``; the remaining two
eigenvalues are recovered from normalization and the constraint, with the
smaller one first.  The chart density is

    J**k * prod(lam)**|m - n| * prod_{i<j} (lam_i - lam_j)**2

where ``J`` is the Jacobian of the map from the two tail eigenvalues to
(trace, constraint) and ``k = StaticEnsembleSpec.jacobian_power``:

* ``k = +1``  density as printed next to the factorisation ``C J g V``;
* ``k =  0``  the integrand used for the single-eigenvalue marginals and the
  energy of the Metropolis walk;
* ``k = -1``  the exact conditional of the Haar-induced measure on the
  constraint surface (the delta-function change of variables).

Every consumer (marginals, sampler, comparisons) takes ``k`` from the same
spec, so the three representations stay mutually consistent.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import InvalidArgument, NonPhysical, NotRealizable, NoSolution, Unsupported
from .quantum import entropy_terms

PURITY = "purity"
ENTROPY = "entropy"


@dataclass(frozen=True)
class StaticEnsembleSpec:
    n: int = 4
    m: int = 16
    constraint: str = PURITY
    value: float = 0.4
    jacobian_power: int = 1
    log_base: float = math.e

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgument("n must be at least 2")
        if self.m < 1:
            raise InvalidArgument("m must be positive")
        if self.jacobian_power not in (-1, 0, 1):
            raise InvalidArgument("jacobian_power must be -1, 0 or 1")
        if self.constraint == PURITY:
            if not (1.0 / self.n < self.value <= 1.0):
                raise InvalidArgument(f"purity {self.value} outside (1/n, 1]")
        elif self.constraint == ENTROPY:
            if self.n != 4:
                raise Unsupported("fixed-entropy ensembles are implemented for n = 4 only")
            if not (0.0 <= self.value < math.log(self.n) / math.log(self.log_base)):
                raise InvalidArgument(f"entropy {self.value} outside [0, log n)")
        else:
            raise InvalidArgument(f"unknown constraint {self.constraint!r}")

    @property
    def exponent(self) -> int:
        return abs(self.m - self.n)

    @property
    def entropy_nats(self) -> float:
        return self.value * math.log(self.log_base)


# --------------------------------------------------------------------------
# tail recovery
# --------------------------------------------------------------------------

def tail_from_purity(free: np.ndarray, P: float):
    """Vectorized tail recovery.  ``free`` has shape ``(..., n - 2)``.

    Returns ``(low, high, disc)``; ``low``/``high`` are NaN where the
    discriminant ``2(P - s2) - (1 - s1)**2`` is negative.
    """
    free = np.asarray(free, dtype=float)
    s1 = free.sum(axis=-1)
    s2 = (free * free).sum(axis=-1)
    disc = 2.0 * (P - s2) - (1.0 - s1) ** 2
    with np.errstate(invalid="ignore"):
        root = np.sqrt(disc)
    low = (1.0 - s1 - root) / 2.0
    high = (1.0 - s1 + root) / 2.0
    return low, high, disc


def recover_tail(free, P: float) -> tuple[float, float]:
    """Two largest-index eigenvalues fixed by normalization and purity."""
    free = np.atleast_1d(np.asarray(free, dtype=float))
    if not np.all(np.isfinite(free)):
        raise InvalidArgument("free coordinates must be finite")
    low, high, disc = tail_from_purity(free, P)
    if disc < 0:
        raise NotRealizable(f"negative discriminant {float(disc):.3e}")
    if low < 0 or np.any(free < 0):
        raise NonPhysical(f"recovered eigenvalue {float(low):.3e} is negative")
    return float(low), float(high)


def jacobian_factor(free, P: float) -> float:
    """``2 sqrt(2(P - s2) - (1 - s1)**2)``, i.e. twice the tail gap."""
    low, high = recover_tail(free, P)
    return 2.0 * (high - low)


def _entropy_residual(x, rest, target):
    # entropy of the pair (x, rest - x) minus the target, natural log
    return entropy_terms(x) + entropy_terms(rest - x) - target


def tail_from_entropy(l1, l2, S_nats: float, iterations: int = 24, newton: int = 8):
    """Vectorized root-finding for ``(lam3, lam4)`` at fixed entropy (n = 4).

    On ``lam3 in [0, c/2]`` with ``c = 1 - l1 - l2`` the pair entropy is
    increasing, so a root exists iff the target lies between the end values.
    A few bisection steps shrink the bracket, then Newton steps (kept inside
    the bracket) polish the root.  Returns ``(low, high, ok)``.
    """
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    rest = 1.0 - l1 - l2
    target = S_nats - entropy_terms(l1) - entropy_terms(l2)
    a = np.zeros(np.broadcast(l1, l2).shape)
    b = np.maximum(rest, 0.0) / 2.0
    fa = _entropy_residual(a, rest, target)
    fb = _entropy_residual(b, rest, target)
    b0 = b
    ok = (rest > 0) & (fa <= 0) & (fb >= 0) & (l1 >= 0) & (l2 >= 0)
    for _ in range(iterations):
        mid = (a + b) / 2.0
        up = _entropy_residual(mid, rest, target) < 0
        a = np.where(up, mid, a)
        b = np.where(up, b, mid)
    x = (a + b) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(newton):
            slope = np.log((rest - x) / x)
            step = _entropy_residual(x, rest, target) / slope
            nxt = x - step
            x = np.where(np.isfinite(nxt) & (nxt >= a) & (nxt <= b), nxt, x)
    # a target at the bracket maximum is a double root; take the endpoint
    low = np.where(fb <= 1e-14, b0, x)
    high = rest - low
    low = np.where(ok, low, np.nan)
    high = np.where(ok, high, np.nan)
    return low, high, ok


def solve_tail_for_entropy(l1: float, l2: float, S: float, base: float = math.e):
    """Scalar fixed-entropy tail; ``S`` is measured in logarithm ``base``."""
    if l1 < 0 or l2 < 0 or l1 + l2 >= 1:
        raise InvalidArgument("need l1, l2 >= 0 and l1 + l2 < 1")
    low, high, ok = tail_from_entropy(l1, l2, S * math.log(base))
    if not bool(ok):
        raise NoSolution(f"no fixed-entropy tail for ({l1}, {l2}) at S={S}")
    return float(low), float(high)


def chart_points(free: np.ndarray, spec: StaticEnsembleSpec) -> np.ndarray:
    """Full eigenvalue vectors in chart order ``(free..., low, high)``; NaN where
    the constraint cannot be met."""
    free = np.asarray(free, dtype=float)
    if free.shape[-1] != spec.n - 2:
        raise InvalidArgument(f"expected {spec.n - 2} free coordinates")
    if spec.constraint == PURITY:
        low, high, _ = tail_from_purity(free, spec.value)
    else:
        low, high, _ = tail_from_entropy(free[..., 0], free[..., 1], spec.entropy_nats)
    return np.concatenate([free, low[..., None], high[..., None]], axis=-1)


# --------------------------------------------------------------------------
# densities
# --------------------------------------------------------------------------

def log_weight(lam: np.ndarray, spec: StaticEnsembleSpec) -> np.ndarray:
    """Log chart density for full vectors in chart order; ``-inf`` outside.

    The tail gap enters as ``(high - low)**(2 + k)`` times the constraint
    specific part of the Jacobian, so the ``k = -1`` case never forms
    ``0 / 0``.
    """
    lam = np.asarray(lam, dtype=float)
    n = spec.n
    k = spec.jacobian_power
    valid = np.all(np.isfinite(lam), axis=-1) & np.all(lam >= 0, axis=-1)
    safe = np.where(np.isfinite(lam), lam, 0.5)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.zeros(lam.shape[:-1])
        if spec.exponent:
            out = out + spec.exponent * np.log(safe).sum(axis=-1)
        for i in range(n):
            for j in range(i + 1, n):
                if (i, j) == (n - 2, n - 1):
                    continue
                out = out + 2.0 * np.log(np.abs(safe[..., i] - safe[..., j]))
        gap = safe[..., n - 1] - safe[..., n - 2]
        out = out + (2 + k) * np.log(gap)
        if k:
            if spec.constraint == PURITY:
                out = out + k * math.log(2.0)
            else:
                ratio = np.log(safe[..., n - 1]) - np.log(safe[..., n - 2])
                # ln(l4/l3) / (l4 - l3) -> 1/l3 as the gap closes
                jfac = np.where(gap > 0, ratio / np.where(gap > 0, gap, 1.0), 1.0 / safe[..., n - 2])
                out = out + k * np.log(jfac)
    out = np.where(valid, out, -np.inf)
    return np.where(np.isnan(out), -np.inf, out)


def log_density(free: np.ndarray, spec: StaticEnsembleSpec) -> np.ndarray:
    return log_weight(chart_points(free, spec), spec)


def unnormalized_density(free, spec: StaticEnsembleSpec):
    """Chart density without the normalization constant; exactly 0 outside
    the physical region.  Scalar in, scalar out."""
    val = np.exp(log_density(np.asarray(free, dtype=float), spec))
    return float(val) if np.ndim(val) == 0 else val


# --------------------------------------------------------------------------
# peak structure
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PeakLocations:
    lambda_minus: float
    lambda_plus: float
    plus_physical: bool

    def __iter__(self):
        return iter((self.lambda_minus, self.lambda_plus))


def peak_locations(n: int, P: float) -> PeakLocations:
    """Degenerate stationary values ``1/n -+ (1/n) sqrt((nP - 1)/(n - 1))``.

    The ``+`` branch is physical only while the remaining eigenvalue
    ``1 - (n - 1) Lambda_+`` stays non-negative, i.e. ``P <= 1/(n - 1)``.
    """
    if P < 1.0 / n or P > 1.0:
        raise InvalidArgument(f"purity {P} outside [1/n, 1]")
    r = math.sqrt(max(n * P - 1.0, 0.0) / (n - 1)) / n
    minus = 1.0 / n - r
    plus = 1.0 / n + r
    return PeakLocations(minus, plus, 1.0 - (n - 1) * plus >= 0.0)


@dataclass(frozen=True)
class PeakModel:
    lambda_minus: float
    lambda_plus: float
    g_max: float
    alpha: float
    sigma2: float
    A: np.ndarray = field(repr=False)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def g_product(free: np.ndarray, P: float) -> np.ndarray:
    """Product of all eigenvalues as a function of the free coordinates."""
    free = np.asarray(free, dtype=float)
    s1 = free.sum(axis=-1)
    s2 = (free * free).sum(axis=-1)
    return (s2 + s1 ** 2 - 2 * s1 + 1 - P) / 2 * np.prod(free, axis=-1)


def peak_model(n: int, m: int, P: float) -> PeakModel:
    """Quadratic model ``g ~ g_max - alpha * t A t`` around the ``Lambda_-`` peak.

    The Hessian of ``g`` at the peak is ``Lambda^(n-2) (n - 1/Lambda) A``,
    hence ``alpha = Lambda^(n-2) (1/Lambda - n) / 2 > 0`` and the Gaussian
    width is ``sigma^2 = g_max / (alpha (m - n))``.
    """
    if m <= n:
        raise Unsupported("the Gaussian peak model needs m > n")
    peaks = peak_locations(n, P)
    lm, lp = peaks.lambda_minus, peaks.lambda_plus
    g_max = float(g_product(np.full(n - 2, lm), P))
    alpha = lm ** (n - 2) * (1.0 / lm - n) / 2.0
    sigma2 = g_max / (alpha * (m - n))
    A = np.ones((n - 2, n - 2)) + np.eye(n - 2)
    return PeakModel(lm, lp, g_max, alpha, sigma2, A)


def gaussian_approx_density(free, spec: StaticEnsembleSpec):
    """Gaussian-times-linearized-nodes approximation near the ``Lambda_-`` peak.

    For n = 4 this is ``exp(-t A t / sigma^2) [(l1 - l2)(2 l1 + l2 - 3L)(l1 + 2 l2 - 3L)]^2``
    with ``t = free - L``.
    """
    if spec.constraint != PURITY:
        raise Unsupported("Gaussian approximation is defined for fixed purity")
    model = peak_model(spec.n, spec.m, spec.value)
    free = np.asarray(free, dtype=float)
    t = free - model.lambda_minus
    quad = np.einsum("...i,ij,...j->...", t, model.A, t)
    nodes = np.ones(free.shape[:-1])
    d = spec.n - 2
    s1 = free.sum(axis=-1)
    for i in range(d):
        for j in range(i + 1, d):
            nodes = nodes * (free[..., i] - free[..., j])
        nodes = nodes * (free[..., i] + s1 - (spec.n - 1) * model.lambda_minus)
    val = np.exp(-quad / model.sigma2) * nodes ** 2
    return float(val) if np.ndim(val) == 0 else val


def peak_offsets(m: int, P: float) -> np.ndarray:
    """The six maxima of the n = 4 Gaussian approximation, shape ``(6, 2)``.

    With ``u = (free - L)/sigma`` the approximation is
    ``exp(-u A u) [(u1 - u2)(2u1 + u2)(u1 + 2u2)]^2``; its maxima sit at
    ``sqrt(3/2) * {(+-1, 0), (0, +-1), +-(1, -1)}``.
    """
    model = peak_model(4, m, P)
    dirs = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [1, -1], [-1, 1]], dtype=float)
    return model.lambda_minus + model.sigma * math.sqrt(1.5) * dirs


# --------------------------------------------------------------------------
# conics (n = 4)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConicDescriptor:
    """``a x^2 + b x y + c y^2 + d x + e y + f`` in the (lam1, lam2) plane."""

    label: str
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    @property
    def coefficients(self) -> tuple:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y + self.f

    @property
    def center(self) -> np.ndarray:
        M = np.array([[2 * self.a, self.b], [self.b, 2 * self.c]])
        return np.linalg.solve(M, [-self.d, -self.e])

    def axes(self):
        """``(semi_axes, directions)``; ``directions[:, i]`` is the unit vector
        of semi-axis ``i``.  Semi-axes are sorted ascending."""
        M = np.array([[self.a, self.b / 2], [self.b / 2, self.c]])
        level = -self(*self.center)
        if np.trace(M) < 0:
            M, level = -M, -level
        w, v = np.linalg.eigh(M)
        if level < 0:
            if level > -1e-14:
                # a point conic, up to round-off
                return np.zeros(2), v
            return np.full(2, np.nan), v
        semi = np.sqrt(level / w)
        order = np.argsort(semi)
        return semi[order], v[:, order]

    @property
    def semi_axes(self) -> np.ndarray:
        return self.axes()[0]

    @property
    def rotation(self) -> float:
        """Angle in ``[0, pi/2)`` of the eigenvector with the larger curvature."""
        M = np.array([[self.a, self.b / 2], [self.b / 2, self.c]])
        w, v = np.linalg.eigh(M)
        vec = v[:, -1]
        return float(math.atan2(vec[1], vec[0]) % (math.pi / 2))

    def sample(self, count: int = 100) -> np.ndarray:
        """Points on the curve, shape ``(count, 2)``."""
        semi, dirs = self.axes()
        phi = np.linspace(0, 2 * np.pi, count, endpoint=False)
        return self.center + (semi[0] * np.cos(phi))[:, None] * dirs[:, 0] + (
            semi[1] * np.sin(phi)
        )[:, None] * dirs[:, 1]


def boundary_conics(P: float) -> list[ConicDescriptor]:
    """Node and boundary curves of the n = 4 chart.

    * Q1: ``lam1 = lam3`` or ``lam1 = lam4``; Q2: the same with ``lam1 <-> lam2``.
    * Q3: ``lam3 = 0`` (exists only for ``P > 1/3``; a point at ``P = 1/3``).
    * Q4: ``lam3 = lam4``; "outer" is the same locus written as the
      discriminant ``2(P - s2) - (1 - s1)^2`` (so its sign is flipped).
    """
    if not (0.25 < P <= 1.0):
        raise InvalidArgument(f"purity {P} outside (1/4, 1]")
    out = [
        ConicDescriptor("Q1", 3.0, 2.0, 1.0, -2.0, -1.0, (1 - P) / 2),
        ConicDescriptor("Q2", 1.0, 2.0, 3.0, -1.0, -2.0, (1 - P) / 2),
    ]
    if P >= 1.0 / 3.0:
        out.append(ConicDescriptor("Q3", 2.0, 2.0, 2.0, -2.0, -2.0, 1 - P))
    out.append(ConicDescriptor("Q4", 3.0, 2.0, 3.0, -2.0, -2.0, 1 - 2 * P))
    out.append(ConicDescriptor("outer", -3.0, -2.0, -3.0, 2.0, 2.0, 2 * P - 1))
    return out


@dataclass(frozen=True)
class StationaryPoint:
    label: str
    point: tuple
    physical: bool
    interior: bool


def stationary_points(P: float) -> list[StationaryPoint]:
    """Stationary points of ``g`` on the n = 4 chart.

    Interior solutions of the two stationarity conditions: the ``Lambda_-``
    and ``Lambda_+`` degenerate points and the two saddles with
    ``lam1 + lam2 = 1/2``.  The edge maxima are the reordered ``Lambda_-``
    triples where Q1/Q2 touch the outer ellipse.
    """
    if not (0.25 < P <= 1.0):
        raise InvalidArgument(f"purity {P} outside (1/4, 1]")
    peaks = peak_locations(4, P)
    lm, lp = peaks.lambda_minus, peaks.lambda_plus
    r = math.sqrt(4 * P - 1) / 4
    sad_lo, sad_hi = 0.25 - r, 0.25 + r
    saddle_ok = sad_lo >= 0
    top = 1 - 3 * lm
    return [
        StationaryPoint("lambda_minus", (lm, lm), lm >= 0, True),
        StationaryPoint("lambda_plus", (lp, lp), peaks.plus_physical, True),
        StationaryPoint("saddle_a", (sad_lo, sad_hi), saddle_ok, True),
        StationaryPoint("saddle_b", (sad_hi, sad_lo), saddle_ok, True),
        StationaryPoint("edge_max_a", (lm, top), lm >= 0, False),
        StationaryPoint("edge_max_b", (top, lm), lm >= 0, False),
    ]


def stationarity_residuals(point, P: float, n: int = 4) -> np.ndarray:
    """Residuals of the pairwise and summed stationarity conditions of ``g``."""
    x = np.asarray(point, dtype=float)
    s1, s2 = x.sum(), (x * x).sum()
    res = [
        (x[j] - x[k]) * (x[j] + x[k] + s1 - 1)
        for j in range(len(x))
        for k in range(j + 1, len(x))
    ]
    res.append(s2 + s1 ** 2 + 2 * (1 - n) / n * s1 + (n - 2) / n * (1 - P))
    return np.array(res)


# --------------------------------------------------------------------------
# chart region and normalization (n = 4, fixed purity)
# --------------------------------------------------------------------------

def _quadratic_roots(a, b, c):
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    s = math.sqrt(disc)
    return (-b - s) / (2 * a), (-b + s) / (2 * a)


def chart_slices(x: float, P: float) -> list[tuple[float, float]]:
    """Intervals of ``lam2`` where ``(x, lam2)`` is a physical chart point."""
    if x < 0:
        return []
    outer = _quadratic_roots(3.0, 2 * x - 2, 3 * x * x - 2 * x + 1 - 2 * P)
    if outer is None:
        return []
    lo, hi = max(outer[0], 0.0), min(outer[1], 1.0 - x)
    if hi <= lo:
        return []
    hole = _quadratic_roots(2.0, 2 * x - 2, 2 * x * x - 2 * x + 1 - P)
    if hole is None or hole[1] <= lo or hole[0] >= hi:
        return [(lo, hi)]
    out = []
    if hole[0] > lo:
        out.append((lo, hole[0]))
    if hole[1] < hi:
        out.append((hole[1], hi))
    return out


def chart_extent(P: float) -> float:
    """Largest ``lam1`` (equivalently ``lam2``) reached by the outer ellipse."""
    # discriminant in y of Q4(x, y) = 0 is -32x^2 + 16x - 8 + 24P
    roots = _quadratic_roots(-32.0, 16.0, -8 + 24 * P)
    return min(max(roots), 1.0)


def _breakpoints(P: float) -> list[float]:
    """Abscissas where the slice structure of the chart changes."""
    pts = []
    for coeffs in (
        (-12.0, 8.0, 8 * P - 4),       # lam3 = 0 ellipse appears in the slice
        (3.0, -2.0, 1 - 2 * P),        # outer ellipse crosses lam2 = 0
        (2.0, -2.0, 1 - P),            # lam3 = 0 ellipse crosses lam2 = 0
    ):
        roots = _quadratic_roots(*coeffs)
        if roots:
            pts.extend(roots)
    ext = chart_extent(P)
    return sorted({p for p in pts if 0 < p < ext})


def _peak_log_scale(spec: StaticEnsembleSpec) -> float:
    ext = chart_extent(spec.value)
    grid = np.linspace(0, ext, 301)
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    ld = log_density(np.stack([X, Y], axis=-1), spec)
    return float(np.max(ld))


def log_normalization(spec: StaticEnsembleSpec, tol: float = 1e-8) -> float:
    """``log`` of the chart integral of the unnormalized density (n = 4, purity),
    by nested adaptive quadrature."""
    if spec.n != 4 or spec.constraint != PURITY:
        raise Unsupported("quadrature normalization is implemented for n = 4 fixed purity")
    P = spec.value
    shift = _peak_log_scale(spec)

    def inner(x):
        total = 0.0
        for a, b in chart_slices(x, P):
            total += integrate.quad(
                lambda y: math.exp(float(log_density(np.array([x, y]), spec)) - shift),
                a, b, epsabs=0.0, epsrel=tol, limit=200,
            )[0]
        return total

    edges = [0.0, *_breakpoints(P), chart_extent(P)]
    val = 0.0
    with warnings.catch_warnings():
        # round-off warnings come from the sqrt edges of the slices
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            val += integrate.quad(inner, a, b, epsabs=0.0, epsrel=tol, limit=200)[0]
    return math.log(val) + shift


def density_grid(spec: StaticEnsembleSpec, edges_x: np.ndarray, edges_y: np.ndarray,
                 sub: int = 6) -> np.ndarray:
    """Bin-averaged chart density normalized to unit integral over the grid.

    Each bin is averaged over ``sub x sub`` midpoints; nonphysical points
    contribute exactly 0.
    """
    def fine(edges):
        edges = np.asarray(edges, dtype=float)
        w = np.diff(edges)
        offs = (np.arange(sub) + 0.5) / sub
        return (edges[:-1, None] + w[:, None] * offs[None, :]).ravel()

    fx, fy = fine(edges_x), fine(edges_y)
    X, Y = np.meshgrid(fx, fy, indexing="ij")
    ld = log_density(np.stack([X, Y], axis=-1), spec)
    top = np.max(ld)
    if not np.isfinite(top):
        raise InvalidArgument("grid does not intersect the physical region")
    vals = np.exp(ld - top)
    nx, ny = len(edges_x) - 1, len(edges_y) - 1
    binned = vals.reshape(nx, sub, ny, sub).mean(axis=(1, 3))
    area = np.outer(np.diff(edges_x), np.diff(edges_y))
    return binned / np.sum(binned * area)


def support_extent(spec: StaticEnsembleSpec, probe: int = 801) -> float:
    """Largest free coordinate with a physical chart point (n = 4)."""
    if spec.constraint == PURITY:
        return chart_extent(spec.value)
    grid = np.linspace(0.0, 1.0, probe)
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    ld = log_density(np.stack([X, Y], axis=-1), spec)
    rows = np.nonzero(np.isfinite(ld).any(axis=1))[0]
    return float(min(grid[rows[-1]] + grid[1], 1.0))


def point_grid(spec: StaticEnsembleSpec, resolution: int):
    """Density at the nodes of a ``resolution x resolution`` grid spanning the
    chart.  Fixed purity (n = 4) is normalized by quadrature, fixed entropy by
    the grid sum."""
    if spec.n != 4:
        raise Unsupported("grid evaluation is implemented for n = 4")
    grid = np.linspace(0.0, support_extent(spec), resolution)
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    ld = log_density(np.stack([X, Y], axis=-1), spec)
    if spec.constraint == PURITY:
        dens = np.exp(ld - log_normalization(spec))
    else:
        dens = np.exp(ld - np.max(ld))
        h = grid[1] - grid[0]
        dens /= dens.sum() * h * h
    return grid, dens

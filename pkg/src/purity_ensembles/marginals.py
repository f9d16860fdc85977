"""Single-eigenvalue marginals of the n = 4 fixed-purity ensemble.

Marginals live on the ordered region ``lam1 <= lam2 <= lam3 <= lam4`` of the
(lam1, lam2) chart.  Integration limits come from the closed-form
boundaries of that region; the inner integrals use adaptive Gauss-Kronrod
quadrature (QUADPACK) and the curve is normalized with the trapezoid rule.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidArgument, NumericalFailure
from .static import StaticEnsembleSpec, log_density

LAMBDA1 = "lambda1"
LAMBDA2 = "lambda2"


@dataclass
class MarginalCurve:
    which: str
    m: int
    P: float
    abscissas: np.ndarray
    densities: np.ndarray
    jacobian_power: int = 1

    @property
    def support(self) -> tuple[float, float]:
        return float(self.abscissas[0]), float(self.abscissas[-1])

    def __call__(self, x):
        return np.interp(x, self.abscissas, self.densities, left=0.0, right=0.0)

    def bin_probabilities(self, edges: np.ndarray) -> np.ndarray:
        """Probability mass of each bin, integrating the piecewise-linear curve."""
        edges = np.asarray(edges, dtype=float)
        x = np.union1d(self.abscissas, edges)
        y = self(x)
        cum = np.concatenate([[0.0], np.cumsum(np.diff(x) * (y[1:] + y[:-1]) / 2)])
        at_edges = np.interp(edges, x, cum)
        return np.diff(at_edges)


def _sqrt0(v: float) -> float:
    return math.sqrt(max(v, 0.0))


def lambda1_limits(P: float) -> tuple[float, float]:
    r = _sqrt0(12 * P - 3)
    return max(0.0, (1 - r) / 4), (3 - r) / 12


def lambda2_range_given_lambda1(l1: float, P: float) -> tuple[float, float]:
    r = _sqrt0(6 * P - 2 + 4 * l1 - 8 * l1 * l1)
    return max(l1, (1 - l1 - r) / 3), (2 - 2 * l1 - r) / 6


def lambda2_limits(P: float) -> tuple[float, float]:
    low = max(0.0, (1 - _sqrt0(4 * P - 1)) / 4)
    if P > 1.0 / 3.0:
        high = (2 - _sqrt0(6 * P - 2)) / 6
    else:
        # reached at (1 - 3L, L, L, L) with L = Lambda_+; continuous at P = 1/3
        high = (3 + _sqrt0(12 * P - 3)) / 12
    return low, high


def lambda1_range_given_lambda2(l2: float, P: float) -> tuple[float, float]:
    low = max(0.0, (1 - l2 - _sqrt0(6 * P - 2 + 4 * l2 - 8 * l2 * l2)) / 3)
    high = min(l2, (1 - 2 * l2 - _sqrt0(2 * P - 1 + 4 * l2 - 8 * l2 * l2)) / 2)
    return low, high


def _check(m: int, P: float, resolution: int):
    if m < 4:
        raise InvalidArgument("marginals need m >= 4")
    if not (0.25 < P < 1.0):
        raise InvalidArgument(f"purity {P} outside (1/4, 1)")
    if resolution < 3:
        raise InvalidArgument("resolution must be at least 3")


def _curve(which, m, P, resolution, jacobian_power, tol, support, inner_range, point):
    spec = StaticEnsembleSpec(n=4, m=m, value=P, jacobian_power=jacobian_power)
    lo, hi = support(P)
    xs = np.linspace(lo, hi, resolution)
    # log-scale at the Lambda_- neighbourhood keeps the integrand O(1)
    probe = np.linspace(lo, hi, 64)
    probe_pts = np.array([point(x, y) for x in probe for y in np.linspace(*inner_range(x, P), 64)
                          if inner_range(x, P)[1] > inner_range(x, P)[0]])
    shift = float(np.max(log_density(probe_pts, spec))) if len(probe_pts) else 0.0
    if not np.isfinite(shift):
        shift = 0.0

    def integrand(y, x):
        return math.exp(float(log_density(np.array(point(x, y)), spec)) - shift)

    vals = np.zeros(resolution)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for i, x in enumerate(xs):
            a, b = inner_range(x, P)
            if b <= a:
                continue
            res, err, info, *rest = integrate.quad(
                integrand, a, b, args=(x,), epsabs=tol, epsrel=0.0, limit=500, full_output=1
            )
            ier = rest[0] if rest else 0
            if ier == 1 or not math.isfinite(res):
                raise NumericalFailure(
                    f"{which} inner integral failed at x={x:.6g}: result={res}, "
                    f"error={err}, evaluations={info['neval']}"
                )
            vals[i] = res
    area = integrate.trapezoid(vals, xs)
    if not area > 0:
        raise NumericalFailure(f"{which} marginal has zero mass for m={m}, P={P}")
    return MarginalCurve(which, m, P, xs, vals / area, jacobian_power)


def marginal_lambda1(m: int, P: float, resolution: int = 512, jacobian_power: int = 1,
                     tol: float = 1e-10) -> MarginalCurve:
    """Density of the smallest eigenvalue at fixed purity (n = 4)."""
    _check(m, P, resolution)
    return _curve(LAMBDA1, m, P, resolution, jacobian_power, tol,
                  lambda1_limits, lambda2_range_given_lambda1, lambda x, y: (x, y))


def marginal_lambda2(m: int, P: float, resolution: int = 512, jacobian_power: int = 1,
                     tol: float = 1e-10) -> MarginalCurve:
    """Density of the second-smallest eigenvalue at fixed purity (n = 4)."""
    _check(m, P, resolution)
    return _curve(LAMBDA2, m, P, resolution, jacobian_power, tol,
                  lambda2_limits, lambda1_range_given_lambda2, lambda x, y: (y, x))


def marginal(which: str, m: int, P: float, **kwargs) -> MarginalCurve:
    if which == LAMBDA1:
        return marginal_lambda1(m, P, **kwargs)
    if which == LAMBDA2:
        return marginal_lambda2(m, P, **kwargs)
    raise InvalidArgument(f"unknown marginal {which!r}")

"""Constrained Metropolis walk on the eigenvalue chart.

The first ``n - 2`` eigenvalues take a random step of length ``eps`` in a
uniformly random direction, negative coordinates are reflected to their
absolute value, and the last two eigenvalues are solved from normalization
and the active constraint.  Proposals whose tail cannot be solved, or that
leave the requested region, count as rejections.  On the full chart each
step is followed by a relabelling move between Vandermonde cells.

Many independent chains advance together as rows of one array.  They share
a single generator stream, which keeps a run reproducible from one seed.
"""
from __future__ import annotations

import collections
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationFailure, InvalidArgument
from .static import (
    PURITY,
    StaticEnsembleSpec,
    chart_points,
    log_weight,
    peak_locations,
    solve_tail_for_entropy,
)

CHART = "chart"
ORDERED = "ordered"

TUNE_WINDOW = 1000
ACCEPT_LOW = 0.4
ACCEPT_HIGH = 0.6
START_OFFSET = 1e-3

__all__ = [
    "ChainConfig", "ChainState", "ChainResult", "potential_energy", "propose_step",
    "acceptance_probability", "metropolis_step", "run_chain", "start_point",
    "solve_tail_for_entropy", "CHART", "ORDERED",
]


def potential_energy(lam, m: int) -> float | np.ndarray:
    """``-|m - n| sum ln lam_i - 2 sum_{i<j} ln|lam_i - lam_j|``; ``+inf`` when forbidden."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if np.any(lam < 0):
        raise InvalidArgument("eigenvalues must be non-negative")
    coef = abs(m - n)
    with np.errstate(divide="ignore"):
        energy = np.zeros(lam.shape[:-1])
        if coef:
            energy = energy - coef * np.log(lam).sum(axis=-1)
        for i in range(n):
            for j in range(i + 1, n):
                energy = energy - 2.0 * np.log(np.abs(lam[..., i] - lam[..., j]))
    return float(energy) if energy.ndim == 0 else energy


def acceptance_probability(energy_from, energy_to):
    """Metropolis rule ``min(1, exp(E_from - E_to))``."""
    delta = np.asarray(energy_from, dtype=float) - np.asarray(energy_to, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(delta >= 0, 1.0, np.exp(np.minimum(delta, 0.0)))
    out = np.where(np.isnan(delta), 0.0, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ChainConfig:
    spec: StaticEnsembleSpec
    step_size: float | None = None
    burn_in: int = 10_000
    thinning: int = 10
    total_samples: int = 10_000
    seed: int = 0
    chains: int = 1000
    region: str = ORDERED

    def __post_init__(self):
        if self.step_size is not None and not self.step_size > 0:
            raise InvalidArgument("step size must be positive")
        if self.burn_in < 0:
            raise InvalidArgument("burn_in must be non-negative")
        if self.thinning < 1:
            raise InvalidArgument("thinning must be at least 1")
        if self.total_samples < 1:
            raise InvalidArgument("total_samples must be positive")
        if self.chains < 1:
            raise InvalidArgument("need at least one chain")
        if self.region not in (CHART, ORDERED):
            raise InvalidArgument(f"unknown region {self.region!r}")


@dataclass
class ChainState:
    """One chain: full chart-order vector, its energy and recent outcomes."""

    current: np.ndarray
    energy: float
    acceptance_window: collections.deque = field(
        default_factory=lambda: collections.deque(maxlen=TUNE_WINDOW)
    )

    @property
    def acceptance_rate(self) -> float:
        w = self.acceptance_window
        return sum(w) / len(w) if w else float("nan")


@dataclass
class ChainResult:
    spectra: np.ndarray  # ascending eigenvalues, one row per sample
    chart: np.ndarray  # raw free coordinates as walked
    step_size: np.ndarray  # frozen per-chain eps
    acceptance_rate: float  # pooled over the sampling phase
    burn_in_acceptance: float  # pooled over the last tuning window
    rejected_constraint: int
    rejected_region: int
    config: ChainConfig

    def metadata(self) -> dict:
        spec = self.config.spec
        return {
            "n": spec.n,
            "m": spec.m,
            "constraint": spec.constraint,
            "value": spec.value,
            "log_base": spec.log_base,
            "jacobian_power": spec.jacobian_power,
            "region": self.config.region,
            "seed": self.config.seed,
            "chains": self.config.chains,
            "burn_in": self.config.burn_in,
            "thinning": self.config.thinning,
            "total_samples": int(len(self.spectra)),
            "step_size_final": float(np.median(self.step_size)),
            "step_size_range": [float(self.step_size.min()), float(self.step_size.max())],
            "acceptance_rate": self.acceptance_rate,
            "burn_in_acceptance": self.burn_in_acceptance,
            "rejected_constraint": self.rejected_constraint,
            "rejected_region": self.rejected_region,
        }


def _energy(points: np.ndarray, spec: StaticEnsembleSpec) -> np.ndarray:
    # the walk's energy is minus the log chart weight: E - k ln J
    return -log_weight(points, spec)


def _log_jacobian(points: np.ndarray, spec: StaticEnsembleSpec) -> np.ndarray:
    """``ln J`` of the tail map; ``J = 2 (high - low)`` for purity and
    ``ln(high / low)`` for entropy."""
    low, high = points[..., -2], points[..., -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        if spec.constraint == PURITY:
            return np.log(2.0 * (high - low))
        return np.log(np.log(high) - np.log(low))


def _in_region(points: np.ndarray, region: str) -> np.ndarray:
    if region == CHART:
        return np.ones(points.shape[:-1], dtype=bool)
    free_tail = points[..., :-1]
    return np.all(np.diff(free_tail, axis=-1) >= 0, axis=-1)


def _degenerate_entropy_level(S_nats: float) -> float:
    """``x`` with entropy of ``(x, x, x, 1 - 3x)`` equal to ``S_nats``."""
    def ent(x):
        return -3 * x * math.log(x) - (1 - 3 * x) * math.log(1 - 3 * x) if x > 0 else 0.0
    lo, hi = 0.0, 0.25
    for _ in range(100):
        mid = (lo + hi) / 2
        if ent(mid) < S_nats:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def start_point(spec: StaticEnsembleSpec) -> np.ndarray:
    """Interior start: the degenerate peak with its first coordinate lowered by 1e-3.

    At the peak ``(L, ..., L, 1 - (n-1) L)`` the energy is infinite.  Moving
    ``lam1`` down pushes the first tail value up by the same amount at first
    order, so the start is strictly ordered.
    """
    if spec.constraint == PURITY:
        base = peak_locations(spec.n, spec.value).lambda_minus
    else:
        base = _degenerate_entropy_level(spec.entropy_nats)
    free = np.full(spec.n - 2, base)
    free[0] -= min(START_OFFSET, base / 2)
    point = chart_points(free, spec)
    if not np.isfinite(log_weight(point, spec)):
        raise ConfigurationFailure(f"no interior start point for {spec}")
    return point


def _directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    if dim == 1:
        return rng.choice([-1.0, 1.0], size=(count, 1))
    if dim == 2:
        phi = rng.uniform(0.0, 2 * math.pi, size=count)
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def propose_step(points: np.ndarray, eps, rng: np.random.Generator,
                 spec: StaticEnsembleSpec) -> np.ndarray:
    """Candidate chart vectors; rows are NaN where the tail cannot be solved."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d = spec.n - 2
    eps = np.broadcast_to(np.asarray(eps, dtype=float), (len(points),))
    free = np.abs(points[:, :d] + eps[:, None] * _directions(rng, len(points), d))
    cand = chart_points(free, spec)
    bad = ~np.all(np.isfinite(cand), axis=-1) | np.any(cand < 0, axis=-1)
    cand[bad] = np.nan
    return cand


def metropolis_step(state: ChainState, eps: float, rng: np.random.Generator,
                    spec: StaticEnsembleSpec, region: str = ORDERED) -> ChainState:
    """Advance a single chain by one proposal, in place."""
    cand = propose_step(state.current[None, :], eps, rng, spec)[0]
    accepted = False
    if np.all(np.isfinite(cand)) and _in_region(cand, region):
        e_new = float(_energy(cand, spec))
        if rng.random() < acceptance_probability(state.energy, e_new):
            state.current, state.energy, accepted = cand, e_new, True
    state.acceptance_window.append(accepted)
    return state


def _initial_step(spec: StaticEnsembleSpec) -> float:
    # rough width of the peak: distance from the degenerate point to the
    # nearest boundary, shrunk with the environment size
    start = start_point(spec)
    scale = max(float(start[spec.n - 2] - start[0]), 1e-3)
    if spec.constraint == PURITY and spec.m > spec.n:
        scale = min(scale, peak_locations(spec.n, spec.value).lambda_minus)
    return scale / math.sqrt(max(spec.m - spec.n, 1) + 1)


class _Walker:
    def __init__(self, config: ChainConfig, rng: np.random.Generator):
        self.config = config
        self.spec = config.spec
        self.rng = rng
        c = config.chains
        self.points = np.repeat(start_point(self.spec)[None, :], c, axis=0)
        self.energy = _energy(self.points, self.spec)
        self.rejected_constraint = 0
        self.rejected_region = 0

    def step(self, eps: np.ndarray) -> np.ndarray:
        cand = propose_step(self.points, eps, self.rng, self.spec)
        finite = np.all(np.isfinite(cand), axis=-1)
        inside = finite & _in_region(np.where(finite[:, None], cand, 0.0), self.config.region)
        self.rejected_constraint += int(np.count_nonzero(~finite))
        self.rejected_region += int(np.count_nonzero(finite & ~inside))
        e_new = np.full(len(cand), np.inf)
        e_new[inside] = _energy(cand[inside], self.spec)
        u = self.rng.random(len(cand))
        accept = inside & (u < acceptance_probability(self.energy, e_new))
        self.points[accept] = cand[accept]
        self.energy[accept] = e_new[accept]
        if self.config.region == CHART:
            self._relabel()
        return accept

    def _relabel(self):
        # the chart is cut into cells by the Vandermonde zeros; a random
        # relabelling (tail kept ascending) moves between cells.  It preserves
        # the symmetric measure dx / J on the constraint surface, not dx, so
        # the acceptance ratio is taken on weight * J
        c, n = self.points.shape
        perm = np.argsort(self.rng.random((c, n)), axis=-1)
        cand = np.take_along_axis(self.points, perm, axis=-1)
        cand[:, n - 2:] = np.sort(cand[:, n - 2:], axis=-1)
        e_old = self.energy - _log_jacobian(self.points, self.spec)
        e_new = _energy(cand, self.spec)
        accept = self.rng.random(c) < acceptance_probability(
            e_old, e_new - _log_jacobian(cand, self.spec))
        self.points[accept] = cand[accept]
        self.energy[accept] = e_new[accept]


def _pre_tune(walker: _Walker, eps: np.ndarray, rounds: int = 30, window: int = 100) -> np.ndarray:
    """Coarse pooled search for a usable starting eps, run before burn-in proper."""
    for _ in range(rounds):
        acc = np.mean([walker.step(eps).mean() for _ in range(window)])
        if ACCEPT_LOW + 0.03 <= acc <= ACCEPT_HIGH - 0.03:
            break
        eps = eps * math.exp(2.0 * (acc - 0.5))
    return eps


def run_chain(config: ChainConfig) -> ChainResult:
    """Sample ``total_samples`` spectra at the fixed constraint.

    Burn-in tunes each chain's eps every 1000 steps (x1.1 above 0.6
    acceptance, x0.9 below 0.4) and then freezes it.  Raises
    :class:`ConfigurationFailure` when the pooled acceptance of the last
    burn-in window is still outside ``[0.4, 0.6]``.
    """
    rng = np.random.default_rng(config.seed)
    walker = _Walker(config, rng)
    c = config.chains
    if config.step_size is None:
        eps = np.full(c, _initial_step(config.spec))
        eps = _pre_tune(walker, eps)
    else:
        eps = np.full(c, float(config.step_size))

    window_hits = np.zeros(c)
    window_len = 0
    last_window = float("nan")
    for t in range(config.burn_in):
        window_hits += walker.step(eps)
        window_len += 1
        if window_len == TUNE_WINDOW or t == config.burn_in - 1:
            rate = window_hits / window_len
            last_window = float(rate.mean())
            eps = np.where(rate > ACCEPT_HIGH, eps * 1.1, np.where(rate < ACCEPT_LOW, eps * 0.9, eps))
            window_hits[:] = 0
            window_len = 0
    if config.burn_in and not (ACCEPT_LOW <= last_window <= ACCEPT_HIGH):
        raise ConfigurationFailure(
            f"acceptance {last_window:.3f} outside [{ACCEPT_LOW}, {ACCEPT_HIGH}] after "
            f"{config.burn_in} burn-in steps; median eps {float(np.median(eps)):.3e}"
        )

    per_chain = -(-config.total_samples // c)
    d = config.spec.n - 2
    kept = np.empty((per_chain, c, config.spec.n))
    hits = 0
    for s in range(per_chain):
        for _ in range(config.thinning):
            hits += int(walker.step(eps).sum())
        kept[s] = walker.points
    # chain-major order so that a prefix of the output mixes all chains
    flat = kept.reshape(-1, config.spec.n)[: config.total_samples]
    return ChainResult(
        spectra=np.sort(flat, axis=-1),
        chart=flat[:, :d].copy(),
        step_size=eps,
        acceptance_rate=hits / (per_chain * config.thinning * c),
        burn_in_acceptance=last_window,
        rejected_constraint=walker.rejected_constraint,
        rejected_region=walker.rejected_region,
        config=config,
    )

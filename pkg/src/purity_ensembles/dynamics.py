"""Random-Hamiltonian decoherence of a two-qubit central system.

Four model families act on ``env (x) q1 (x) q2`` (total dimension ``4m``):

``global``     a single GUE matrix on the whole space
``coupling``   ``H_env (x) I_4 + eps * GUE(4m)``
``spectator``  ``H_env (x) I_4 + eps * V_(env,q1) (x) I_q2``
``common``     spectator plus ``eps * V'_(env,q2)`` acting trivially on q1

A realization draws a fresh Hamiltonian and Haar environment state, evolves
``env (x) (sin t|00> + cos t|11>)`` with the spectral propagator and stops at
the first time the central purity reaches the target.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import EmptyEnsemble, InvalidArgument, NumericalFailure
from .quantum import HilbertSpaceLayout, eigenvalues_sorted, haar_random_state, sample_gue

GLOBAL = "global"
COUPLING = "coupling"
SPECTATOR = "spectator"
COMMON = "common"
MODEL_KINDS = (GLOBAL, COUPLING, SPECTATOR, COMMON)

PURITY_TOL = 1e-8
MAX_PURITY_STEP = 0.01
PILOT_REALIZATIONS = 10
PILOT_FACTOR = 50.0
PILOT_HORIZON = 1e5  # in units of 1 / (spectral width)
WORKERS_ENV = "PURITY_ENSEMBLES_WORKERS"
_PILOT_KEY = 0xFFFFFFFF


@dataclass(frozen=True)
class HamiltonianModel:
    kind: str
    m: int
    eps: float = 1.0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InvalidArgument(f"unknown model {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.m < 2:
            raise InvalidArgument("environment dimension must be at least 2")
        if self.kind != GLOBAL and not self.eps > 0:
            raise InvalidArgument("coupling strength must be positive")

    @property
    def layout(self) -> HilbertSpaceLayout:
        return HilbertSpaceLayout(self.m, 4, qubit_split=True)

    @property
    def dim(self) -> int:
        return 4 * self.m


@dataclass(frozen=True)
class InitialStateSpec:
    theta: float = 0.0
    central: tuple | None = None  # optional explicit 4-vector replacing the theta family

    def __post_init__(self):
        if self.central is None and not (0.0 <= self.theta <= math.pi / 4 + 1e-15):
            raise InvalidArgument("theta must lie in [0, pi/4]")
        if self.central is not None:
            c = np.asarray(self.central, dtype=complex)
            if c.shape != (4,) or abs(np.linalg.norm(c) - 1.0) > 1e-12:
                raise InvalidArgument("central state must be a normalized 4-vector")

    def central_state(self) -> np.ndarray:
        if self.central is not None:
            return np.asarray(self.central, dtype=complex)
        # basis index 2*q1 + q2
        out = np.zeros(4, dtype=complex)
        out[0] = math.sin(self.theta)
        out[3] = math.cos(self.theta)
        return out


@dataclass
class EvolutionResult:
    spectrum: np.ndarray | None
    t_hit: float
    converged: bool
    purity: float = float("nan")


def _embed_env_q2(v: np.ndarray, m: int) -> np.ndarray:
    """Lift an operator on ``env (x) q2`` to ``env (x) q1 (x) q2``."""
    v4 = v.reshape(m, 2, m, 2)
    full = np.einsum("ebfd,ac->eabfcd", v4, np.eye(2))
    return full.reshape(4 * m, 4 * m)


def build_hamiltonian(model: HamiltonianModel, rng: np.random.Generator) -> np.ndarray:
    m = model.m
    if model.kind == GLOBAL:
        return sample_gue(4 * m, rng)
    h = np.kron(sample_gue(m, rng), np.eye(4))
    if model.kind == COUPLING:
        h = h + model.eps * sample_gue(4 * m, rng)
    else:
        h = h + model.eps * np.kron(sample_gue(2 * m, rng), np.eye(2))
        if model.kind == COMMON:
            h = h + model.eps * _embed_env_q2(sample_gue(2 * m, rng), m)
    return (h + h.conj().T) / 2


def initial_state(spec: InitialStateSpec, m: int, rng: np.random.Generator) -> np.ndarray:
    return np.kron(haar_random_state(m, rng), spec.central_state())


class SpectralPropagator:
    """``psi(t) = U exp(-i E t) U^dagger psi0`` after one diagonalization."""

    def __init__(self, h: np.ndarray, psi0: np.ndarray, m: int):
        self.energies, self.vectors = np.linalg.eigh(h)
        self.coeffs = self.vectors.conj().T @ psi0
        self.m = m

    @property
    def width(self) -> float:
        return float(self.energies[-1] - self.energies[0]) or 1.0

    def state(self, t: float) -> np.ndarray:
        return self.vectors @ (np.exp(-1j * self.energies * t) * self.coeffs)

    def reduced(self, t: float) -> np.ndarray:
        psi = self.state(t).reshape(self.m, 4)
        rho = psi.T @ psi.conj()
        return (rho + rho.conj().T) / 2

    def purity(self, t: float) -> float:
        psi = self.state(t).reshape(self.m, 4)
        gram = psi.conj().T @ psi
        return float(np.sum(np.abs(gram) ** 2))


def _first_crossing(prop: SpectralPropagator, target: float, t_max: float):
    """Bracket the first downward crossing on an adaptive grid; ``None`` if absent."""
    dt = 0.05 / prop.width
    t, p = 0.0, prop.purity(0.0)
    if p <= target:
        return 0.0, 0.0
    while t < t_max:
        t_next = min(t + dt, t_max)
        p_next = prop.purity(t_next)
        if abs(p_next - p) > MAX_PURITY_STEP and dt > 1e-12 / prop.width:
            dt /= 2
            continue
        if p_next <= target:
            return t, t_next
        if abs(p_next - p) < MAX_PURITY_STEP / 4:
            dt *= 1.5
        t, p = t_next, p_next
    return None


def evolve_to_purity(h: np.ndarray, psi0: np.ndarray, target: float, t_max: float,
                     m: int | None = None) -> EvolutionResult:
    """Evolve until the central purity first equals ``target`` (to 1e-8)."""
    if not (0.25 < target < 1.0):
        raise InvalidArgument(f"target purity {target} outside (1/4, 1)")
    if not t_max > 0:
        raise InvalidArgument("t_max must be positive")
    if m is None:
        m = len(psi0) // 4
    prop = SpectralPropagator(h, psi0, m)
    bracket = _first_crossing(prop, target, t_max)
    if bracket is None:
        return EvolutionResult(None, float("nan"), False)
    a, b = bracket
    if b > a:
        t_hit = optimize.brentq(lambda s: prop.purity(s) - target, a, b,
                                xtol=1e-15 * max(b, 1.0), rtol=4 * np.finfo(float).eps, maxiter=500)
    else:
        t_hit = a
    rho = prop.reduced(t_hit)
    lam = eigenvalues_sorted(rho)
    pur = float(np.sum(lam ** 2))
    if abs(pur - target) > PURITY_TOL:
        raise NumericalFailure(f"purity {pur:.12f} at crossing misses target {target}")
    return EvolutionResult(lam / lam.sum(), float(t_hit), True, pur)


def realization_rng(seed: int, index: int, pilot: bool = False) -> np.random.Generator:
    key = (_PILOT_KEY, index) if pilot else (index,)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _realize(model, spec, target, t_max, seed, index, pilot=False):
    rng = realization_rng(seed, index, pilot)
    h = build_hamiltonian(model, rng)
    psi0 = initial_state(spec, model.m, rng)
    return evolve_to_purity(h, psi0, target, t_max, model.m)


def pilot_timescale(model: HamiltonianModel, spec: InitialStateSpec, target: float, seed: int,
                    count: int = PILOT_REALIZATIONS) -> float:
    """Median time for the purity to fall halfway from 1 to ``target``."""
    halfway = (1.0 + target) / 2
    times = []
    for i in range(count):
        rng = realization_rng(seed, i, pilot=True)
        h = build_hamiltonian(model, rng)
        width = float(np.ptp(np.linalg.eigvalsh(h))) or 1.0
        res = _realize(model, spec, halfway, PILOT_HORIZON / width, seed, i, pilot=True)
        if res.converged:
            times.append(res.t_hit)
    if not times:
        raise EmptyEnsemble("no pilot realization decayed; set t_max explicitly")
    return float(np.median(times))


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise InvalidArgument(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
        if n < 1:
            raise InvalidArgument(f"{WORKERS_ENV} must be positive")
        return n
    return os.cpu_count() or 1


def _realize_block(args):
    model, spec, target, t_max, seed, indices = args
    return [(i, _realize(model, spec, target, t_max, seed, i)) for i in indices]


@dataclass
class DynamicEnsemble:
    spectra: np.ndarray  # converged realizations, ascending rows
    t_hit: np.ndarray  # per attempted realization, NaN when discarded
    converged: np.ndarray
    t_max: float
    manifest: dict = field(default_factory=dict)

    @property
    def discarded(self) -> int:
        return int(np.count_nonzero(~self.converged))

    @property
    def discard_fraction(self) -> float:
        return self.discarded / len(self.converged)


def run_dynamic_ensemble(model: HamiltonianModel, spec: InitialStateSpec, target: float, N: int,
                         seed: int = 0, t_max: float | None = None,
                         workers: int | None = None) -> DynamicEnsemble:
    """``N`` independent realizations; deterministic in ``seed`` for any worker count."""
    if N < 1:
        raise InvalidArgument("need at least one realization")
    if not (0.25 < target < 1.0):
        raise InvalidArgument(f"target purity {target} outside (1/4, 1)")
    if t_max is not None and not t_max > 0:
        raise InvalidArgument(f"t_max must be positive, got {t_max}")
    tau = None
    if t_max is None:
        tau = pilot_timescale(model, spec, target, seed)
        t_max = PILOT_FACTOR * tau
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise InvalidArgument("workers must be positive")

    results: dict[int, EvolutionResult] = {}
    if workers == 1:
        for i in range(N):
            results[i] = _realize(model, spec, target, t_max, seed, i)
    else:
        blocks = [list(range(w, N, workers)) for w in range(workers)]
        jobs = [(model, spec, target, t_max, seed, b) for b in blocks if b]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(_realize_block, jobs):
                results.update(chunk)

    ordered = [results[i] for i in range(N)]
    converged = np.array([r.converged for r in ordered])
    t_hit = np.array([r.t_hit for r in ordered])
    if not converged.any():
        raise EmptyEnsemble(f"all {N} realizations were discarded before t_max={t_max:.4g}")
    spectra = np.array([r.spectrum for r in ordered if r.converged])
    manifest = {
        "model": model.kind,
        "m": model.m,
        "eps": model.eps,
        "theta": spec.theta,
        "central_state": None if spec.central is None else [str(c) for c in spec.central],
        "P_target": target,
        "N": N,
        "seed": seed,
        "t_max": t_max,
        "pilot_timescale": tau,
        "converged": int(converged.sum()),
        "discarded": int((~converged).sum()),
        "workers": workers,
    }
    if (~converged).any():
        warnings.warn(f"{int((~converged).sum())} of {N} realizations discarded", RuntimeWarning,
                      stacklevel=2)
    return DynamicEnsemble(spectra, t_hit, converged, t_max, manifest)

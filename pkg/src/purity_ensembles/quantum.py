"""Linear-algebra and sampling primitives.

Conventions
-----------
* States are 1D complex arrays, density matrices 2D complex arrays and
  spectra 1D real arrays sorted ascending.
* The total space is ordered ``env (x) cen`` and, when the central system is
  two qubits, ``env (x) q1 (x) q2``.  The environment index is the slowest
  varying one, so a state reshapes to an ``(m, n)`` matrix ``Psi[e, c]``.
* GUE: ``H = (A + A^dagger) / 2`` with ``A`` having i.i.d. complex Gaussian
  entries of unit mean-square modulus (real and imaginary parts ``N(0, 1/2)``).
  Then ``H_ii ~ N(0, 1/2)`` and the real and imaginary parts of ``H_ij``
  (``i != j``) are ``N(0, 1/4)``, so the diagonal variance is twice the
  off-diagonal component variance and ``E|H_ij|^2 = 1/2`` for all entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericalFailure

STATE_NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
SPECTRUM_SUM_TOL = 1e-10
CLAMP_THRESHOLD = -1e-10


@dataclass(frozen=True)
class HilbertSpaceLayout:
    """Bipartite layout ``env (x) cen`` with dimensions ``m`` and ``n``."""

    m: int
    n: int
    qubit_split: bool = False

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InvalidArgument(f"dimensions must be positive, got m={self.m}, n={self.n}")
        if self.qubit_split and self.n != 4:
            raise InvalidArgument("qubit_split requires n = 4")

    @property
    def dim(self) -> int:
        return self.m * self.n


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1:
        raise InvalidArgument(f"dimension must be a positive integer, got {dim!r}")
    return int(dim)


def sample_gue(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a ``dim x dim`` GUE matrix (see module docstring for the scale)."""
    dim = _check_dim(dim)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    a *= math.sqrt(0.5)
    h = (a + a.conj().T) / 2
    # exact hermiticity: the diagonal is real by construction
    h[np.diag_indices(dim)] = h.diagonal().real
    return h


def haar_random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unit vector in ``C^dim``."""
    dim = _check_dim(dim)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def check_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise InvalidArgument("state vector must be one-dimensional")
    if abs(np.vdot(psi, psi).real - 1.0) > STATE_NORM_TOL:
        raise InvalidArgument("state vector is not normalized")
    return psi


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidArgument("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise InvalidArgument("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
        raise InvalidArgument("density matrix does not have unit trace")
    return rho


def check_spectrum(lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1:
        raise InvalidArgument("spectrum must be one-dimensional")
    if np.any(lam < 0):
        raise InvalidArgument("spectrum has negative entries")
    if abs(lam.sum() - 1.0) > SPECTRUM_SUM_TOL:
        raise InvalidArgument("spectrum does not sum to one")
    return lam


def partial_trace_env(psi: np.ndarray, layout: HilbertSpaceLayout) -> np.ndarray:
    """Reduced density matrix of the central factor of ``psi``.

    ``rho[c, d] = sum_e Psi[e, c] conj(Psi[e, d])``; this is the complex
    conjugate (equivalently the transpose) of ``Psi^dagger Psi`` and has the
    same spectrum.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size != layout.dim:
        raise InvalidArgument(
            f"state of size {psi.size} does not match layout {layout.m}x{layout.n}"
        )
    mat = psi.reshape(layout.m, layout.n)
    rho = mat.T @ mat.conj()
    return (rho + rho.conj().T) / 2


def purity(x: np.ndarray) -> float:
    """``sum(lam**2)`` for a spectrum or ``tr(rho**2)`` for a density matrix."""
    x = np.asarray(x)
    if x.ndim == 1:
        return float(np.sum(np.abs(x) ** 2))
    if x.ndim == 2:
        # tr(rho^2) = ||rho||_F^2 for Hermitian rho
        return float(np.sum(np.abs(x) ** 2))
    raise InvalidArgument("purity expects a spectrum or a density matrix")


def von_neumann_entropy(lam: np.ndarray, base: float = math.e) -> float:
    """``-sum lam ln lam`` with ``0 ln 0 = 0``; ``base`` rescales the logarithm."""
    lam = np.asarray(lam, dtype=float)
    return float(entropy_terms(lam).sum(axis=-1) / math.log(base))


def entropy_terms(lam: np.ndarray) -> np.ndarray:
    """Elementwise ``-x ln x`` (natural log) with the ``x = 0`` limit."""
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -lam * np.log(lam)
    return np.where(lam > 0, out, 0.0)


def eigenvalues_sorted(rho: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix with round-off clamped to 0."""
    rho = np.asarray(rho)
    lam = np.linalg.eigvalsh(rho)
    if lam[0] < CLAMP_THRESHOLD:
        raise NumericalFailure(f"eigenvalue {lam[0]:.3e} below clamp threshold")
    return np.clip(lam, 0.0, None)


def kron_all(*ops: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1)) if ops[0].ndim == 2 else np.ones(1)
    for op in ops:
        out = np.kron(out, op)
    return out

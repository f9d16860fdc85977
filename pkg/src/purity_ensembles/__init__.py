"""Eigenvalue ensembles of reduced density matrices at fixed purity, and the
random-Hamiltonian decoherence models they are compared against."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigurationFailure,
    DegeneratePoint,
    EmptyEnsemble,
    EnsembleError,
    InvalidArgument,
    NonPhysical,
    NoSolution,
    NotRealizable,
    NumericalFailure,
    Unsupported,
)
from .static import (  # noqa: E402
    StaticEnsembleSpec,
    boundary_conics,
    peak_locations,
    recover_tail,
    stationary_points,
    unnormalized_density,
)
from .marginals import marginal_lambda1, marginal_lambda2  # noqa: E402
from .mcmc import ChainConfig, run_chain  # noqa: E402
from .dynamics import HamiltonianModel, InitialStateSpec, run_dynamic_ensemble  # noqa: E402
from .analysis import compare_ensembles, kolmogorov_distance, sampling_error_bar  # noqa: E402

__all__ = [
    "__version__",
    "ConfigurationFailure", "DegeneratePoint", "EmptyEnsemble", "EnsembleError",
    "InvalidArgument", "NonPhysical", "NoSolution", "NotRealizable", "NumericalFailure",
    "Unsupported",
    "StaticEnsembleSpec", "boundary_conics", "peak_locations", "recover_tail",
    "stationary_points", "unnormalized_density",
    "marginal_lambda1", "marginal_lambda2",
    "ChainConfig", "run_chain",
    "HamiltonianModel", "InitialStateSpec", "run_dynamic_ensemble",
    "compare_ensembles", "kolmogorov_distance", "sampling_error_bar",
]

"""Exception classes shared across the package.

Each class carries an ``error_class`` string used by the CLI to report
failures in machine-readable form.
"""


class EnsembleError(Exception):
    error_class = "ensemble-error"


class InvalidArgument(EnsembleError, ValueError):
    error_class = "invalid-argument"


class NotRealizable(EnsembleError, ValueError):
    """Tail eigenvalues would be complex (negative discriminant)."""

    error_class = "not-realizable"


class NonPhysical(EnsembleError, ValueError):
    """Tail eigenvalues are real but one of them is negative."""

    error_class = "nonphysical"


class NumericalFailure(EnsembleError, ArithmeticError):
    error_class = "numerical-failure"


class NoSolution(EnsembleError, ValueError):
    error_class = "no-solution"


class ConfigurationFailure(EnsembleError, RuntimeError):
    error_class = "configuration-failure"


class EmptyEnsemble(EnsembleError, RuntimeError):
    error_class = "empty-ensemble"


class Unsupported(EnsembleError, NotImplementedError):
    error_class = "unsupported"


class DegeneratePoint(EnsembleError, ValueError):
    """Projection of the sphere centre, where the angles are undefined."""

    error_class = "degenerate-point"

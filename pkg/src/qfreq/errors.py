"""Exception hierarchy shared by every qfreq module."""


class QFreqError(Exception):
    """Base class for all errors raised by qfreq."""


class DimensionMismatchError(QFreqError, ValueError):
    """Two Q-points disagree in multiplicity or ambient dimension."""


class BruteForceLimitError(QFreqError, ValueError):
    """Permutation enumeration requested above the factorial guard."""


class ParameterError(QFreqError, ValueError):
    """A numeric parameter is outside its admissible range."""


class DomainError(QFreqError, ValueError):
    """A disk or point falls outside the field's domain."""


class SingularPointError(QFreqError, ValueError):
    """Derivatives requested at a branch point, where they do not exist."""


class DegenerateHeightError(QFreqError, ArithmeticError):
    """The height vanishes on a circle, so the frequency is undefined."""


class DegenerateEnergyError(QFreqError, ArithmeticError):
    """Zero Dirichlet energy: no conformal completion can be normalized."""


class SeriesFitError(QFreqError, ArithmeticError):
    """A power series failed to reproduce the sampled data."""

    def __init__(self, message, residual=None, tolerance=None):
        super().__init__(message)
        self.residual = residual
        self.tolerance = tolerance


class ConfigError(QFreqError, ValueError):
    """Invalid run configuration; ``path`` names the offending key."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path

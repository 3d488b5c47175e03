"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`QcdError`.
The command-line front end maps the three families below to exit codes.
"""


class QcdError(Exception):
    """Base class for library errors."""


class ConfigurationError(QcdError, ValueError):
    """A parameter is outside its valid domain (bandwidth, quantile level, m, C...)."""


class DataError(QcdError, ValueError):
    """Input data is malformed or unsuitable."""


class InvalidInputError(DataError):
    pass


class PanelShapeError(DataError):
    pass


class IncompatibleFeaturesError(DataError):
    pass


class InvalidMembershipError(DataError):
    pass


class TooFewSeriesError(DataError):
    pass


class NumericalError(QcdError, ArithmeticError):
    """A computation hit a degenerate configuration."""


class DegenerateDataError(NumericalError):
    pass


class DegeneratePartitionError(NumericalError):
    pass


class EmptyClusterError(NumericalError):
    pass


class UnstableSpecError(ConfigurationError):
    """A generating process is explosive or non-stationary."""


class InfeasibleError(ConfigurationError):
    pass

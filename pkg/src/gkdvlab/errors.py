"""Exception types shared across the package.

The CLI maps these to distinct exit codes: ConfigError to 2, ResolutionError
(including ChartError) to 3, ContractError to 4.
"""


class GKdVLabError(Exception):
    """Base class for all package errors."""


class ConfigError(GKdVLabError):
    """Invalid configuration, out-of-range parameter, or API misuse."""


class ResolutionError(GKdVLabError):
    """The requested grid cannot represent the requested object accurately."""


class ChartError(ResolutionError):
    """A state is outside the coordinate chart, or the chart map degenerated."""


class ContractError(GKdVLabError):
    """A quantitative contract window was violated at run time."""

"""Exception types shared across the package."""


class AwlabError(Exception):
    """Base class for all package-specific errors."""


class NegativeWeight(AwlabError, ValueError):
    """An edge was given a negative conductance."""


class RootIsolated(AwlabError, ValueError):
    """The root has zero measure after pruning zero-weight edges."""


class Unreachable(AwlabError, LookupError):
    """No path of positive-weight edges joins the two vertices."""


class NotConnected(AwlabError, ValueError):
    """The region is not connected inside the graph."""


class RootNotInRegion(AwlabError, ValueError):
    """The region does not contain the root."""


class NoExit(AwlabError, ValueError):
    """The region has zero boundary kernel mass; the killed walk never leaves."""


class RegionNotContained(AwlabError, ValueError):
    """A region was expected to sit inside another region or box."""


class TransientUnsupported(AwlabError, ValueError):
    """No infinite-start comparison curve exists for this profile function."""


class UnsupportedCombination(AwlabError, ValueError):
    """No closed-form constant is available for this parameter combination."""


class BudgetExceeded(AwlabError, RuntimeError):
    """Exhaustive enumeration would visit more sets than the configured budget."""


class ExcessiveTruncation(AwlabError, RuntimeError):
    """More than the tolerated fraction of Monte Carlo trials hit the horizon."""


class ConfigError(AwlabError, ValueError):
    """An experiment configuration is invalid or incomplete."""

"""Exception types shared across the solver."""


class MhdsemError(Exception):
    """Base class for all solver errors."""


class InvalidStateError(MhdsemError):
    """A conserved state is physically inadmissible (rho <= 0 or P <= 0)."""


class ConfigError(MhdsemError):
    """A run configuration is inconsistent or incomplete."""


class UnrecoverableElementError(MhdsemError):
    """An element mean violates the filter constraints; no feasible filter
    factor exists.  Carries diagnostic context for the offending element."""

    def __init__(self, message, element=None, mean_state=None, margins=None,
                 step=None, stage=None):
        super().__init__(message)
        self.element = element
        self.mean_state = mean_state
        self.margins = margins
        self.step = step
        self.stage = stage

"""Exception types shared across the solver."""


class FpcurvError(Exception):
    """Base class for all package errors."""


class GridFoldError(FpcurvError):
    """A grid cell has nonpositive volume (1/J below the fold threshold).

    Carries the padded-array index of the first offending cell in ``where``.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class InvalidStateError(FpcurvError):
    """A conserved state decoded to nonpositive density or pressure.

    ``where`` holds the cell index when known; ``stage`` the RK stage index.
    """

    def __init__(self, message, where=None, stage=None):
        super().__init__(message)
        self.where = where
        self.stage = stage


class StencilError(FpcurvError):
    """An operation was handed fewer points than its stencil requires."""


class ConfigError(FpcurvError):
    """A run configuration failed validation (unknown key, bad value, ...)."""

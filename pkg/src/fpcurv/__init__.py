"""Free-stream preserving high-order upwind FD Euler solver on curvilinear grids."""

from .errors import ConfigError, FpcurvError, GridFoldError, InvalidStateError, StencilError
from .euler import GAMMA

__all__ = [
    "GAMMA",
    "ConfigError",
    "FpcurvError",
    "GridFoldError",
    "InvalidStateError",
    "StencilError",
]

__version__ = "0.1.0"

"""Range-free node localization for anisotropic wireless sensor networks."""

__version__ = "0.1.0"

from .config import ScenarioConfig, parse_scenario
from .estimators import AWMinMaxLocalizer, DVHopLocalizer
from .exceptions import ConfigError, DegenerateGeometryError, GeometryError

__all__ = [
    "AWMinMaxLocalizer",
    "ConfigError",
    "DVHopLocalizer",
    "DegenerateGeometryError",
    "GeometryError",
    "ScenarioConfig",
    "parse_scenario",
    "__version__",
]

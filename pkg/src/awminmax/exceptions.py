"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid scenario or solver configuration."""


class GeometryError(ValueError):
    """A geometric construction has no valid solution (circles do not
    intersect, density cannot be normalized, ...)."""


class DegenerateGeometryError(GeometryError):
    """Anchor layout is rank deficient for multilateration."""

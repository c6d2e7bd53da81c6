"""Exception types shared across the package."""


class UnshredError(Exception):
    """Base class for all package-specific failures."""


class GeometryError(UnshredError, ValueError):
    """Raster or strip dimensions outside an operation's valid range."""


class DegenerateStripError(GeometryError):
    """Strip too small to carry the two-column edge profiles."""


class PgmParseError(UnshredError, ValueError):
    """Malformed PGM input; the message names the defect."""


class FragmentationError(UnshredError):
    """A scan sheet decomposed into implausibly many components."""


class ConsistencyError(UnshredError):
    """Cross-artifact bookkeeping mismatch: unknown ids or bad manifests."""


class SearchSizeError(UnshredError):
    """Exhaustive assembly refused because the instance is too large."""

"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: parse errors exit 2,
numerical failures exit 3, asserted-inequality failures exit 1.
"""


class CapgeoError(Exception):
    """Base class for all capgeo errors."""


class ParseError(CapgeoError):
    """Malformed body descriptor, config file, or CLI argument."""


class GeometryError(CapgeoError):
    """Invalid body parameters or a mesh that violates its contracts."""


class SolverError(CapgeoError):
    """Capacity solve failed: non-convergence, bad box, or bad p."""


class FlowError(CapgeoError):
    """Flow integration failed: lost star-shapedness, H <= 0, or instability."""


class QuadratureError(CapgeoError):
    """Surface quadrature could not be trusted (singular-patch misuse etc.)."""

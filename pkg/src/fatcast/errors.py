"""Exception types shared across the package."""


class FatcastError(Exception):
    """Base class for all package errors."""


class DegenerateInput(FatcastError):
    """Point set is coplanar, collinear or otherwise too small for a hull."""


class InvalidPolyhedron(FatcastError):
    """Vertex/facet data does not describe a closed convex polyhedron."""


class DegenerateCut(FatcastError):
    """Cutting plane misses the interior or leaves an empty side."""


class CenterOutside(FatcastError):
    """Proposed annulus center is not strictly inside the polyhedron."""


class NotCastable(FatcastError):
    """Polyhedron cannot be pulled out of its mold through the given facet."""


class PreconditionFailed(FatcastError):
    pass


class CapExceeded(FatcastError):
    """Generator hit its point budget before reaching the target ratio."""

    def __init__(self, message, best_ratio):
        super().__init__(message)
        self.best_ratio = best_ratio


class PerturbationFailed(FatcastError):
    pass


class OFFParseError(FatcastError):
    pass

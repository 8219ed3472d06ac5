"""Exception types raised across the library.

Errors ending in the word "Cut" or "Mismatch" signal internal consistency
failures (a structural guarantee of the algorithm was violated); the rest
reject bad input or report resource-style limits.
"""


class SkelError(Exception):
    """Base class for all library errors."""


class DegenerateEdge(SkelError):
    """Edge too short to define a frame and no virtual direction given."""


class OffPlane(SkelError):
    """Point does not lie on the expected plane within tolerance."""


class OffSlab(SkelError):
    """Point does not lie on the slab within tolerance."""


class NotWeaklySimple(SkelError):
    """Polygon walk does not bound a topological disk."""


class TooFewVertices(SkelError):
    """Polygon needs at least three distinct vertices."""


class NonPlanar(SkelError):
    """PSLG segments cross somewhere other than shared endpoints."""


class DanglingSegment(SkelError):
    """PSLG segment has zero length or a bad vertex reference."""


class ChainTooShort(SkelError):
    """Chain cannot be split further."""


class MissingMotorcycle(SkelError):
    """A reflex vertex has no motorcycle in the supplied graph."""


class SimulationDiverged(SkelError):
    """Motorcycle simulation launched far more motorcycles than expected."""


class NoInitialIntersection(SkelError):
    """Gluing-vertex faces do not meet; indicates an internal bug."""


class DefiningChainCut(SkelError):
    """A splicing path crossed a defining chain; indicates an internal bug."""


class ChainMismatch(SkelError):
    """Cut boundaries of the two surfaces disagree beyond tolerance."""


class DisconnectedViolation(SkelError):
    """Fringe edges needing simplification do not form one chain."""


class SeamMismatch(SkelError):
    """Adjacent cell fragments disagree along a shared boundary."""


class OracleScaleExceeded(SkelError):
    """Brute-force oracle asked to run beyond its supported size."""


class NotConvex(SkelError):
    """Operation requires a convex polygon."""

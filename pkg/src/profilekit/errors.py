"""Exception types raised by the geometric kernel and invariant layers.

Every error carries a human-readable message; callers that need to
distinguish failure modes should catch the specific subclass.
"""

__all__ = [
    "ProfileKitError",
    "NotEmbedded", "DegenerateSegment", "UnmarkedReversal",
    "NonManifold", "InconsistentOrientation", "DegenerateFace",
    "SelfIntersecting", "PerturbationTooLarge", "AnchorMismatch",
    "DegenerateProjection", "PersistentDegeneracy", "CurvesIntersect",
    "ResidualTooLarge",
    "VerticalTangent", "PushOffCollision", "UnstableEpsilon",
    "AmbiguousCusp",
    "NoRoomForKink", "InsufficientFacts",
    "ResolutionTooLow", "TubeTooFat", "UnknownPreset",
]


class ProfileKitError(Exception):
    """Base class for all package errors."""


# --- curve / mesh construction -------------------------------------------

class NotEmbedded(ProfileKitError):
    """Curve has two non-adjacent segments closer than the embedding floor."""


class DegenerateSegment(ProfileKitError):
    """Curve repeats a sample point, giving a zero-length segment."""


class UnmarkedReversal(ProfileKitError):
    """Consecutive segments are antiparallel at a sample not marked as a cusp."""


class NonManifold(ProfileKitError):
    """Mesh edge is shared by a number of faces other than two."""


class InconsistentOrientation(ProfileKitError):
    """Two faces traverse a shared edge in the same direction."""


class DegenerateFace(ProfileKitError):
    """Mesh face with (numerically) zero area."""


class SelfIntersecting(ProfileKitError):
    """Two vertex-disjoint mesh faces touch or interpenetrate."""


class PerturbationTooLarge(ProfileKitError):
    """Requested perturbation magnitude would break validity guarantees."""


class AnchorMismatch(ProfileKitError):
    """Curve sample does not lie on its declared anchor face."""


# --- projection / diagram --------------------------------------------------

class DegenerateProjection(ProfileKitError):
    """Vertical projection of the input is not generic (tangency, triple
    point, equal heights at a crossing, or a crossing at a segment endpoint)."""


class PersistentDegeneracy(ProfileKitError):
    """Degeneracy survived the whole perturbation retry schedule."""


class CurvesIntersect(ProfileKitError):
    """Two curves that must be disjoint come closer than the embedding floor."""


class ResidualTooLarge(ProfileKitError):
    """Gauss linking integral did not land near an integer."""


# --- framings ---------------------------------------------------------------

class VerticalTangent(ProfileKitError):
    """Curve tangent is (near) vertical at a sample not marked as a cusp."""


class PushOffCollision(ProfileKitError):
    """Push-off curve touches the original curve or is itself invalid."""


class UnstableEpsilon(ProfileKitError):
    """Surface linking number changed when the push-off distance was halved."""


# --- profile extraction ------------------------------------------------------

class AmbiguousCusp(ProfileKitError):
    """A run of near-vertical samples is too long to localize a cusp."""


# --- obstruction / correction ------------------------------------------------

class NoRoomForKink(ProfileKitError):
    """No writhe-adjusting kink could be inserted along the curve."""


class InsufficientFacts(ProfileKitError):
    """Surface-exclusion rule needs diagram facts that were not supplied."""


# --- generators ----------------------------------------------------------------

class ResolutionTooLow(ProfileKitError):
    """Requested sampling resolution cannot produce a valid mesh or curve."""


class TubeTooFat(ProfileKitError):
    """Tube radius is too large for the core curve's minimum feature size."""


class UnknownPreset(ProfileKitError):
    """Preset name is not one of the published presets."""

"""profilekit: profile curves of surfaces under vertical projection.

Extract the fold cycles of a triangulated surface, compute diagram and
framing invariants (writhe, linking numbers, surface linking number,
cusp chirality), decide when a curve on a surface can be made a profile
curve, and repair writhe deficits by verified kink insertion.
"""
from .diagram import (Crossing, CuspPoint, PlanarDiagram, cusp_chirality,
                      linking_number, linking_number_gauss, project, writhe)
from .errors import *  # noqa: F401,F403 -- the error module defines __all__
from .framing import (FramedCurve, blackboard_framing, clearance, push_off,
                      surface_framing, surface_linking, writhe_definitional)
from .generators import (GeneratorParams, PRESET_NAMES, preset, standard_surface,
                         torus_with_curve, tube_around_knot, twin_projection_cores)
from .geom import (CurveOnSurface, PLCurve3, TriMesh, build_curve, build_mesh,
                   min_feature_size, mirrored, perturb, perturb_jointly, rotated)
from .obstruction import (ContourVerdict, DiagramFacts, Exclusion, ObstructionReport,
                          check_contour, check_realizable, exclude_surfaces, ri_correct)
from .profile import (ProfileCurve, ProfileLinkSummary, detect_cusps,
                      extract_profile, profile_link_summary)

__version__ = "0.1.0"

"""Framings of curves and the framed invariants.

A framing attaches a unit normal to every sample.  Two kinds:

* blackboard: the horizontal unit vector normal to the tangent, chosen
  continuously along the curve; the field switches sides exactly at
  cusp marks.  Linking with this push-off is the writhe.
* surface: the anchor face's normal of a curve-on-surface.  Linking
  with this push-off is the surface linking number, an isotopy
  invariant of the pair (curve, surface).
"""
from __future__ import annotations

import numpy as np

from .diagram import linking_number
from .errors import (
    DegenerateSegment,
    NotEmbedded,
    ProfileKitError,
    PushOffCollision,
    UnmarkedReversal,
    UnstableEpsilon,
    VerticalTangent,
)
from . import geom
from .geom import build_curve, point_triangle_distances, segment_distances

BLACKBOARD = "blackboard"
SURFACE = "surface"

VERTICAL_Z_TOL = 1e-6        # |T_z| above 1 - tol at an unmarked sample fails
REVERSAL_COS = -np.cos(np.pi / 4)   # projected turn sharper than 135 degrees
EPSILON_FRACTION = 0.25      # default push-off distance as a fraction


class FramedCurve:
    """A curve with a unit normal per sample.

    Blackboard normals are exactly horizontal and exactly orthogonal to
    the sample tangent away from cusps; at a cusp the previous normal is
    carried through.  Surface normals are exactly the anchor face
    normals (on a triangulated surface these deviate from tangent
    orthogonality by the local dihedral angle; the smooth limit restores
    it).
    """

    def __init__(self, curve, normals, kind):
        normals = np.asarray(normals, dtype=float).copy()
        normals.setflags(write=False)
        self.curve = curve
        self.normals = normals
        self.kind = kind


def _tangents(curve):
    seg = curve.segment_vectors()
    lens = np.linalg.norm(seg, axis=1)
    dirs = seg / lens[:, None]
    t = np.roll(dirs, 1, axis=0) + dirs
    tn = np.linalg.norm(t, axis=1)
    if (tn <= 1e-12).any():
        raise VerticalTangent("tangent undefined at an antiparallel junction")
    return t / tn[:, None], dirs


def blackboard_framing(curve):
    """Horizontal normal field, continuous along the curve.

    Raises VerticalTangent when the tangent is numerically vertical or
    the projected direction reverses at a sample not marked as a cusp.
    """
    n = len(curve)
    T, dirs = _tangents(curve)
    marked = np.zeros(n, dtype=bool)
    if curve.cusp_marks:
        marked[list(curve.cusp_marks)] = True

    tz = np.abs(T[:, 2])
    bad = (tz > 1.0 - VERTICAL_Z_TOL) & ~marked
    if bad.any():
        raise VerticalTangent(f"near-vertical tangent at unmarked sample {int(np.argmax(bad))}")

    pu = dirs[:, :2]
    pl = np.linalg.norm(pu, axis=1)
    if (pl <= 0).any():
        raise VerticalTangent("exactly vertical segment")
    pd = (np.roll(pu, 1, axis=0) * pu).sum(axis=1) / (np.roll(pl, 1) * pl)
    rev = (pd < REVERSAL_COS) & ~marked
    if rev.any():
        raise VerticalTangent(f"projected direction reverses at unmarked sample {int(np.argmax(rev))}")

    hyp = np.hypot(T[:, 0], T[:, 1])
    safe = np.where(hyp > 0, hyp, 1.0)
    base = np.stack([-T[:, 1] / safe, T[:, 0] / safe, np.zeros(n)], axis=1)

    normals = np.zeros((n, 3))
    start = int(np.argmin(marked))  # first unmarked sample
    if marked[start]:
        raise VerticalTangent("every sample is marked as a cusp")
    normals[start] = base[start]
    side = 1
    for k in range(1, n + 1):
        i = (start + k) % n
        if i == start:
            if side != 1:
                raise ProfileKitError(
                    "blackboard framing does not close up (odd cusp count)"
                )
            break
        if marked[i]:
            normals[i] = normals[(start + k - 1) % n]
            side = -side
        else:
            normals[i] = side * base[i]
    return FramedCurve(curve, normals, BLACKBOARD)


def surface_framing(c):
    """Frame a curve-on-surface by its anchor face normals."""
    return FramedCurve(c.curve, c.mesh.face_normals[c.anchors], SURFACE)


def push_off(framed, epsilon):
    """Displace the curve by epsilon along its framing.

    Requires 0 < epsilon < half the curve's minimum feature size.  The
    result must be an embedded curve disjoint from the original, else
    PushOffCollision.
    """
    curve = framed.curve
    mfs = curve.min_feature_size()
    if not 0 < epsilon < 0.5 * mfs:
        raise ValueError(f"epsilon {epsilon:.3g} outside (0, {0.5 * mfs:.3g})")
    try:
        pushed = build_curve(curve.samples + epsilon * framed.normals, curve.cusp_marks)
    except (NotEmbedded, DegenerateSegment, UnmarkedReversal) as e:
        raise PushOffCollision(f"push-off is not embedded: {e}") from e
    p, q = curve.samples, pushed.samples
    pn, qn = np.roll(p, -1, axis=0), np.roll(q, -1, axis=0)
    i, j = np.meshgrid(np.arange(len(p)), np.arange(len(q)), indexing="ij")
    gap = segment_distances(p[i.ravel()], pn[i.ravel()], q[j.ravel()], qn[j.ravel()])
    allpts = np.concatenate([p, q])
    diam = float(np.linalg.norm(allpts.max(axis=0) - allpts.min(axis=0)))
    if float(gap.min()) <= geom.EMBED_TOL * diam:
        raise PushOffCollision(f"push-off touches the curve (gap {float(gap.min()):.3g})")
    return pushed


def clearance(c):
    """Distance from the curve to mesh faces that share no vertex with
    the sample's anchor face; sets the safe push-off scale."""
    samples = c.curve.samples
    faces = c.mesh.faces
    tri = c.mesh.vertices[faces]
    anchor_verts = faces[c.anchors]
    n = len(samples)
    best = np.inf
    chunk = max(1, 4_000_000 // max(len(faces), 1))
    for s in range(0, n, chunk):
        e = min(n, s + chunk)
        d = point_triangle_distances(
            samples[s:e, None, :], tri[None, :, 0], tri[None, :, 1], tri[None, :, 2]
        )
        share = (faces[None, :, :, None] == anchor_verts[s:e, None, None, :]).any(axis=(2, 3))
        d = np.where(share, np.inf, d)
        best = min(best, float(d.min()))
    return best


def surface_linking(c, seed=0, epsilon=None):
    """Linking number of a curve-on-surface with its surface push-off.

    epsilon defaults to a quarter of the clearance; the result must
    agree at epsilon/2 (UnstableEpsilon otherwise), which guards against
    push-offs that leave the isotopy class of the framing.
    """
    f = surface_framing(c)
    if epsilon is None:
        eps = EPSILON_FRACTION * clearance(c)
        eps = min(eps, 0.45 * c.curve.min_feature_size())
    else:
        eps = epsilon
    lk = linking_number(push_off(f, eps), c.curve, seed)
    lk_half = linking_number(push_off(f, eps / 2), c.curve, seed)
    if lk != lk_half:
        raise UnstableEpsilon(f"linking {lk} at eps={eps:.3g} but {lk_half} at eps/2")
    return lk


def writhe_definitional(curve, seed=0, epsilon=None):
    """Writhe as linking of the curve with its blackboard push-off.

    Agrees with the signed-crossing writhe; kept separate so the two
    routes can check each other.
    """
    f = blackboard_framing(curve)
    eps = EPSILON_FRACTION * curve.min_feature_size() if epsilon is None else epsilon
    return linking_number(push_off(f, eps), curve, seed)

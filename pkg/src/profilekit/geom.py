"""Geometric kernel: validated polyline curves, triangle meshes, and
curves anchored to faces of a host mesh.

Coordinates are float64 throughout.  Objects freeze their arrays at
construction; every mutating operation returns a new object.  Distance
tolerances are relative to the object diameter unless noted otherwise.
"""
from __future__ import annotations

import numpy as np

from .errors import (
    AnchorMismatch,
    DegenerateFace,
    DegenerateSegment,
    InconsistentOrientation,
    NonManifold,
    NotEmbedded,
    PerturbationTooLarge,
    SelfIntersecting,
    UnmarkedReversal,
)

# Relative tolerances.  EMBED_TOL scales with diameter and is the floor
# below which two disjoint pieces count as touching.  WARNING: lowering
# EMBED_TOL invalidates the frozen expected values in the test suite.
EMBED_TOL = 1e-9
ANTIPARALLEL_TOL = 1e-6    # rad; 3D turn within this of pi is a reversal
FACE_AREA_TOL = 1e-12      # x diameter^2
ANCHOR_TOL = 1e-6          # x mesh diameter


def unit(v, axis=-1):
    """Normalize along an axis. Zero vectors are the caller's problem."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=axis, keepdims=True)
    return v / n


def rotation_matrix(axis, angle):
    """Rodrigues rotation matrix about a unit axis."""
    k = unit(np.asarray(axis, dtype=float))
    kx, ky, kz = k
    K = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def segment_distances(p0, p1, q0, q1):
    """Minimum distances between pairs of 3D segments (broadcast arrays).

    Clamped closest-point computation; exact for non-degenerate segments
    up to roundoff.
    """
    p0, p1, q0, q1 = (np.asarray(x, dtype=float) for x in (p0, p1, q0, q1))
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = _dot(d1, d1)
    e = _dot(d2, d2)
    b = _dot(d1, d2)
    c = _dot(d1, r)
    f = _dot(d2, r)
    denom = a * e - b * b
    safe_denom = np.where(denom > 0, denom, 1.0)
    s = np.where(denom > 0, np.clip((b * f - c * e) / safe_denom, 0.0, 1.0), 0.0)
    safe_e = np.where(e > 0, e, 1.0)
    t = (b * s + f) / safe_e
    safe_a = np.where(a > 0, a, 1.0)
    s = np.where(t < 0, np.clip(-c / safe_a, 0.0, 1.0), s)
    s = np.where(t > 1, np.clip((b - c) / safe_a, 0.0, 1.0), s)
    t = np.clip(t, 0.0, 1.0)
    diff = (p0 + s[..., None] * d1) - (q0 + t[..., None] * d2)
    return np.linalg.norm(diff, axis=-1)


def point_segment_distances(p, a, b):
    d = b - a
    dd = _dot(d, d)
    t = np.clip(_dot(p - a, d) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
    return np.linalg.norm(p - (a + t[..., None] * d), axis=-1)


def point_triangle_distances(p, a, b, c):
    """Exact point-to-triangle distances (broadcast arrays of shape (...,3)).

    The closest point is either the orthogonal projection (when it lands
    inside) or lies on one of the three edges.
    """
    ab = b - a
    ac = c - a
    ap = p - a
    e00 = _dot(ab, ab)
    e01 = _dot(ab, ac)
    e11 = _dot(ac, ac)
    d1 = _dot(ab, ap)
    d2 = _dot(ac, ap)
    det = e00 * e11 - e01 * e01
    ok = det > 0
    safe_det = np.where(ok, det, 1.0)
    v = (e11 * d1 - e01 * d2) / safe_det
    w = (e00 * d2 - e01 * d1) / safe_det
    inside = ok & (v >= 0) & (w >= 0) & (v + w <= 1)
    n = np.cross(ab, ac)
    nn = _dot(n, n)
    plane = np.abs(_dot(ap, n)) / np.sqrt(np.where(nn > 0, nn, 1.0))
    edge = np.minimum(
        point_segment_distances(p, a, b),
        np.minimum(point_segment_distances(p, b, c), point_segment_distances(p, a, c)),
    )
    return np.where(inside, plane, edge)


def segments_pierce_triangles(s0, s1, a, b, c):
    """Boolean: does each segment cross its triangle's interior plane patch?"""
    d = s1 - s0
    e1 = b - a
    e2 = c - a
    pvec = np.cross(d, e2)
    det = _dot(e1, pvec)
    scale = np.linalg.norm(d, axis=-1) * np.linalg.norm(e1, axis=-1) * np.linalg.norm(e2, axis=-1)
    ok = np.abs(det) > 1e-14 * np.where(scale > 0, scale, 1.0)
    inv = 1.0 / np.where(ok, det, 1.0)
    tvec = s0 - a
    u = _dot(tvec, pvec) * inv
    qvec = np.cross(tvec, e1)
    v = _dot(d, qvec) * inv
    t = _dot(e2, qvec) * inv
    return ok & (u >= 0) & (v >= 0) & (u + v <= 1) & (t >= 0) & (t <= 1)


def _bbox_diameter(points):
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    return float(np.linalg.norm(hi - lo))


class PLCurve3:
    """Closed polyline curve in R^3.

    Parameters
    ----------
    samples : (N, 3) array
        Vertices; segment i runs from sample i to sample (i + 1) mod N.
    cusp_marks : iterable of int
        Sample indices where the projected tangent may reverse.

    Use :func:`build_curve` to get a validated instance.
    """

    def __init__(self, samples, cusp_marks=()):
        samples = np.array(samples, dtype=float)
        samples.setflags(write=False)
        self.samples = samples
        self.cusp_marks = tuple(sorted({int(i) for i in cusp_marks}))
        self._diameter = None
        self._mfs = None

    def __len__(self):
        return len(self.samples)

    @property
    def diameter(self):
        if self._diameter is None:
            self._diameter = _bbox_diameter(self.samples)
        return self._diameter

    def segment_vectors(self):
        """(N, 3) array of segment vectors, cyclic."""
        return np.roll(self.samples, -1, axis=0) - self.samples

    def segment_pairs(self):
        """Index pairs (i, j) of non-adjacent segments, i < j."""
        n = len(self.samples)
        i, j = np.triu_indices(n, k=2)
        keep = ~((i == 0) & (j == n - 1))
        return i[keep], j[keep]

    def min_feature_size(self):
        """Smallest of: segment length, gap between non-adjacent segments."""
        if self._mfs is None:
            seg = self.segment_vectors()
            lens = np.linalg.norm(seg, axis=1)
            mfs = lens.min()
            i, j = self.segment_pairs()
            if len(i):  # a triangle has no nonadjacent segment pairs
                p = self.samples
                pn = np.roll(p, -1, axis=0)
                gaps = segment_distances(p[i], pn[i], p[j], pn[j])
                mfs = min(mfs, gaps.min())
            self._mfs = float(mfs)
        return self._mfs


class TriMesh:
    """Closed oriented triangle mesh.

    Use :func:`build_mesh` to get a validated instance.  Adjacency and
    normals are computed lazily and cached.
    """

    def __init__(self, vertices, faces):
        vertices = np.array(vertices, dtype=float)
        faces = np.array(faces, dtype=np.int64)
        vertices.setflags(write=False)
        faces.setflags(write=False)
        self.vertices = vertices
        self.faces = faces
        self._diameter = None
        self._normals = None
        self._areas = None
        self._edges = None
        self._edge_faces = None
        self._mfs = None

    @property
    def diameter(self):
        if self._diameter is None:
            self._diameter = _bbox_diameter(self.vertices)
        return self._diameter

    def _compute_normals(self):
        v = self.vertices
        f = self.faces
        cr = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
        norms = np.linalg.norm(cr, axis=1)
        self._areas = 0.5 * norms
        self._normals = cr / np.where(norms > 0, norms, 1.0)[:, None]

    @property
    def face_normals(self):
        if self._normals is None:
            self._compute_normals()
        return self._normals

    @property
    def face_areas(self):
        if self._areas is None:
            self._compute_normals()
        return self._areas

    def _compute_edges(self):
        # Each undirected edge with the two faces that use it; orientation
        # bookkeeping happens during validation.
        f = self.faces
        ed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        face_of = np.tile(np.arange(len(f)), 3)
        key = np.sort(ed, axis=1)
        order = np.lexsort((key[:, 1], key[:, 0]))
        key = key[order]
        face_of = face_of[order]
        uniq, start = np.unique(key, axis=0, return_index=True)
        self._edges = uniq
        ef = np.stack([face_of[start], face_of[start + 1]], axis=1)
        self._edge_faces = ef

    @property
    def edges(self):
        if self._edges is None:
            self._compute_edges()
        return self._edges

    @property
    def edge_faces(self):
        if self._edge_faces is None:
            self._compute_edges()
        return self._edge_faces

    @property
    def euler_characteristic(self):
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def face_boxes(self, pad=0.0):
        tri = self.vertices[self.faces]
        return tri.min(axis=1) - pad, tri.max(axis=1) + pad

    def min_feature_size(self):
        """Smallest of: edge length, gap between vertex-disjoint faces."""
        if self._mfs is None:
            v = self.vertices
            e = self.edges
            min_edge = float(np.linalg.norm(v[e[:, 0]] - v[e[:, 1]], axis=1).min())
            gap = _min_face_gap(self, upper=min_edge)
            self._mfs = min(min_edge, gap)
        return self._mfs


def _disjoint_face_pairs(mesh, pad):
    """Vertex-disjoint face pairs whose padded bounding boxes overlap."""
    lo, hi = mesh.face_boxes(pad)
    f = mesh.faces
    nf = len(f)
    out_i = []
    out_j = []
    chunk = max(1, 20_000_000 // max(nf, 1) // 8)
    for s in range(0, nf, chunk):
        e = min(nf, s + chunk)
        overlap = np.all(
            (lo[s:e, None, :] <= hi[None, :, :]) & (lo[None, :, :] <= hi[s:e, None, :]),
            axis=2,
        )
        ii, jj = np.nonzero(overlap)
        ii = ii + s
        keep = jj > ii
        ii, jj = ii[keep], jj[keep]
        if len(ii):
            shared = (f[ii][:, :, None] == f[jj][:, None, :]).any(axis=(1, 2))
            ii, jj = ii[~shared], jj[~shared]
        out_i.append(ii)
        out_j.append(jj)
    return np.concatenate(out_i), np.concatenate(out_j)


def _face_pair_distances(mesh, fi, fj):
    """Exact distances between disjoint face pairs (min over edge-edge and
    vertex-face candidates)."""
    v = mesh.vertices
    t1 = v[mesh.faces[fi]]
    t2 = v[mesh.faces[fj]]
    best = np.full(len(fi), np.inf)
    idx = [(0, 1), (1, 2), (2, 0)]
    for a0, a1 in idx:
        for b0, b1 in idx:
            d = segment_distances(t1[:, a0], t1[:, a1], t2[:, b0], t2[:, b1])
            best = np.minimum(best, d)
    for k in range(3):
        best = np.minimum(best, point_triangle_distances(t1[:, k], t2[:, 0], t2[:, 1], t2[:, 2]))
        best = np.minimum(best, point_triangle_distances(t2[:, k], t1[:, 0], t1[:, 1], t1[:, 2]))
    return best


def _face_pairs_pierce(mesh, fi, fj):
    v = mesh.vertices
    t1 = v[mesh.faces[fi]]
    t2 = v[mesh.faces[fj]]
    hit = np.zeros(len(fi), dtype=bool)
    for a0, a1 in [(0, 1), (1, 2), (2, 0)]:
        hit |= segments_pierce_triangles(t1[:, a0], t1[:, a1], t2[:, 0], t2[:, 1], t2[:, 2])
        hit |= segments_pierce_triangles(t2[:, a0], t2[:, a1], t1[:, 0], t1[:, 1], t1[:, 2])
    return hit


def _min_face_gap(mesh, upper):
    """Minimum distance over vertex-disjoint face pairs, pruned by bounding
    boxes: only pairs whose padded boxes overlap can beat `upper`."""
    best = upper
    fi, fj = _disjoint_face_pairs(mesh, pad=0.5 * upper)
    if len(fi):
        d = _face_pair_distances(mesh, fi, fj)
        best = min(best, float(d.min()))
    return best


class CurveOnSurface:
    """A curve together with, for every sample, the mesh face it lies on.

    Validates at construction: anchors index real faces, every sample
    sits on its anchor face (within ANCHOR_TOL x mesh diameter), and
    consecutive anchors are identical or share at least one vertex.
    """

    def __init__(self, curve, anchors, mesh):
        anchors = np.array(anchors, dtype=np.int64)
        anchors.setflags(write=False)
        self.curve = curve
        self.anchors = anchors
        self.mesh = mesh
        self._validate()

    def _validate(self):
        n = len(self.curve)
        if len(self.anchors) != n:
            raise AnchorMismatch(f"{len(self.anchors)} anchors for {n} samples")
        if len(self.mesh.faces) == 0 or self.anchors.min() < 0 or self.anchors.max() >= len(self.mesh.faces):
            raise AnchorMismatch("anchor face index out of range")
        v = self.mesh.vertices
        tri = v[self.mesh.faces[self.anchors]]
        d = point_triangle_distances(self.curve.samples, tri[:, 0], tri[:, 1], tri[:, 2])
        tol = ANCHOR_TOL * self.mesh.diameter
        if (d > tol).any():
            k = int(np.argmax(d))
            raise AnchorMismatch(
                f"sample {k} is {d[k]:.3g} from anchor face {self.anchors[k]} (tol {tol:.3g})"
            )
        f = self.mesh.faces[self.anchors]
        fn = self.mesh.faces[np.roll(self.anchors, -1)]
        same = self.anchors == np.roll(self.anchors, -1)
        share = (f[:, :, None] == fn[:, None, :]).any(axis=(1, 2))
        ok = same | share
        if not ok.all():
            k = int(np.argmin(ok))
            raise AnchorMismatch(f"anchors {self.anchors[k]} and {np.roll(self.anchors, -1)[k]} share no vertex")


def build_curve(samples, cusp_marks=()):
    """Validate and build a closed polyline curve.

    Raises DegenerateSegment, UnmarkedReversal or NotEmbedded when the
    samples do not describe an embedded closed curve.
    """
    curve = PLCurve3(samples, cusp_marks)
    _validate_curve(curve)
    return curve


def _validate_curve(curve):
    p = curve.samples
    if p.ndim != 2 or p.shape[1] != 3:
        raise DegenerateSegment("samples must have shape (N, 3)")
    n = len(p)
    if n < 3:
        raise DegenerateSegment("need at least 3 samples")
    if not np.isfinite(p).all():
        raise DegenerateSegment("non-finite sample")
    if curve.cusp_marks and (curve.cusp_marks[0] < 0 or curve.cusp_marks[-1] >= n):
        raise ValueError("cusp mark out of range")
    diam = curve.diameter
    seg = curve.segment_vectors()
    lens = np.linalg.norm(seg, axis=1)
    if diam == 0 or (lens <= 1e-12 * diam).any():
        k = int(np.argmin(lens))
        raise DegenerateSegment(f"segment {k} has length {lens[k]:.3g}")
    dirs = seg / lens[:, None]
    # 3D reversal at a sample means the curve doubles back on itself.
    dots = (np.roll(dirs, 1, axis=0) * dirs).sum(axis=1)
    reversal = dots < -np.cos(ANTIPARALLEL_TOL)
    marked = np.zeros(n, dtype=bool)
    if curve.cusp_marks:
        marked[list(curve.cusp_marks)] = True
    bad = reversal & ~marked
    if bad.any():
        raise UnmarkedReversal(f"antiparallel turn at sample {int(np.argmax(bad))}")
    i, j = curve.segment_pairs()
    mfs = lens.min()
    if len(i):  # a triangle has no nonadjacent segment pairs
        pn = np.roll(p, -1, axis=0)
        gaps = segment_distances(p[i], pn[i], p[j], pn[j])
        floor = EMBED_TOL * diam
        if (gaps <= floor).any():
            k = int(np.argmin(gaps))
            raise NotEmbedded(f"segments {i[k]} and {j[k]} are {gaps[k]:.3g} apart")
        mfs = min(mfs, gaps.min())
    curve._mfs = float(mfs)
    return curve


def build_mesh(vertices, faces):
    """Validate and build a closed, consistently oriented, embedded mesh.

    Raises NonManifold, InconsistentOrientation, DegenerateFace or
    SelfIntersecting accordingly.
    """
    mesh = TriMesh(vertices, faces)
    _validate_mesh(mesh)
    return mesh


def _validate_mesh(mesh):
    v = mesh.vertices
    f = mesh.faces
    if v.ndim != 2 or v.shape[1] != 3 or f.ndim != 2 or f.shape[1] != 3:
        raise DegenerateFace("vertices must be (V,3), faces (F,3)")
    if not np.isfinite(v).all():
        raise DegenerateFace("non-finite vertex")
    if len(f) < 4:
        raise NonManifold("a closed surface needs at least 4 faces")
    if f.min() < 0 or f.max() >= len(v):
        raise DegenerateFace("face index out of range")
    if ((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 2] == f[:, 0])).any():
        raise DegenerateFace("face repeats a vertex")
    diam = mesh.diameter
    if (mesh.face_areas <= FACE_AREA_TOL * diam * diam).any():
        raise DegenerateFace(f"face {int(np.argmin(mesh.face_areas))} has ~zero area")

    # Manifold + orientation: every undirected edge appears exactly twice,
    # once in each direction.
    ed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    key = np.sort(ed, axis=1)
    direction = (ed[:, 0] < ed[:, 1]).astype(np.int8)
    order = np.lexsort((key[:, 1], key[:, 0]))
    key = key[order]
    direction = direction[order]
    same_as_prev = np.zeros(len(key), dtype=bool)
    same_as_prev[1:] = (key[1:] == key[:-1]).all(axis=1)
    run_starts = np.nonzero(~same_as_prev)[0]
    run_lengths = np.diff(np.append(run_starts, len(key)))
    if (run_lengths != 2).any():
        bad = int(np.argmax(run_lengths != 2))
        raise NonManifold(f"edge {tuple(key[run_starts[bad]])} lies on {run_lengths[bad]} faces")
    d0 = direction[run_starts]
    d1 = direction[run_starts + 1]
    if (d0 == d1).any():
        k = run_starts[int(np.argmax(d0 == d1))]
        raise InconsistentOrientation(f"edge {tuple(key[k])} traversed twice the same way")

    # Embeddedness: no vertex-disjoint face pair touches or interpenetrates.
    tol = EMBED_TOL * diam
    fi, fj = _disjoint_face_pairs(mesh, pad=tol)
    if len(fi):
        if _face_pairs_pierce(mesh, fi, fj).any():
            raise SelfIntersecting("face pair interpenetrates")
        d = _face_pair_distances(mesh, fi, fj)
        if (d <= tol).any():
            k = int(np.argmin(d))
            raise SelfIntersecting(f"faces {fi[k]} and {fj[k]} are {d[k]:.3g} apart")
    return mesh


def min_feature_size(obj):
    """Minimum feature size of a curve or mesh (see the class methods)."""
    return obj.min_feature_size()


def _centroid(points):
    return points.mean(axis=0)


def rotated(obj, axis, angle, center=None):
    """Rigidly rotate a curve, mesh, or curve-on-surface; revalidates."""
    R = rotation_matrix(axis, angle)

    def rot(points, ctr):
        return (points - ctr) @ R.T + ctr

    if isinstance(obj, PLCurve3):
        ctr = _centroid(obj.samples) if center is None else np.asarray(center, dtype=float)
        return build_curve(rot(obj.samples, ctr), obj.cusp_marks)
    if isinstance(obj, TriMesh):
        ctr = _centroid(obj.vertices) if center is None else np.asarray(center, dtype=float)
        return build_mesh(rot(obj.vertices, ctr), obj.faces)
    if isinstance(obj, CurveOnSurface):
        ctr = _centroid(obj.mesh.vertices) if center is None else np.asarray(center, dtype=float)
        curve = build_curve(rot(obj.curve.samples, ctr), obj.curve.cusp_marks)
        mesh = build_mesh(rot(obj.mesh.vertices, ctr), obj.mesh.faces)
        return CurveOnSurface(curve, obj.anchors, mesh)
    raise TypeError(f"cannot rotate {type(obj).__name__}")


def mirrored(curve):
    """Reflect a curve through the xz-plane (negate y). Revalidates."""
    p = curve.samples.copy()
    p[:, 1] = -p[:, 1]
    return build_curve(p, curve.cusp_marks)


def perturb(obj, seed, magnitude):
    """Seeded rigid rotation about a random axis through the centroid.

    `magnitude` is the rotation angle in radians, so the displacement of
    any point is bounded by magnitude x diameter.  Magnitude 0 returns
    the object unchanged.  Rigid motions preserve every intrinsic
    invariant, so repeated perturbation cannot drift the answers.
    """
    if magnitude < 0:
        raise ValueError("magnitude must be >= 0")
    if magnitude == 0:
        return obj
    if isinstance(obj, CurveOnSurface):
        cap_obj = obj.mesh
        diam = obj.mesh.diameter
    else:
        cap_obj = obj
        diam = obj.diameter
    if magnitude * diam >= 0.5 * cap_obj.min_feature_size():
        raise PerturbationTooLarge(
            f"displacement {magnitude * diam:.3g} vs feature size {cap_obj.min_feature_size():.3g}"
        )
    rng = np.random.default_rng(seed)
    axis = unit(rng.normal(size=3))
    return rotated(obj, axis, magnitude)


def perturb_jointly(objs, seed, magnitude):
    """Apply one common seeded rotation to several objects.

    The rotation is about the centroid of all points together, so
    relative positions (and any linking between the objects) are exactly
    preserved.
    """
    if magnitude == 0:
        return list(objs)
    clouds = []
    for o in objs:
        clouds.append(o.samples if isinstance(o, PLCurve3) else o.vertices)
    ctr = _centroid(np.concatenate(clouds))
    rng = np.random.default_rng(seed)
    axis = unit(rng.normal(size=3))
    return [rotated(o, axis, magnitude, center=ctr) for o in objs]

"""Test-surface and test-curve generators.

Everything returned here is validated through the kernel constructors,
so a generator either produces a clean object or raises.  Mesh
resolutions come from GeneratorParams; curves on surfaces are built
through the parameter-space affine map of their anchor triangle, so
samples lie exactly on the anchor face.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay
from skimage import measure

from .diagram import CuspPoint, PlanarDiagram, cusp_chirality
from .errors import ResolutionTooLow, TubeTooFat, UnknownPreset
from .geom import CurveOnSurface, PLCurve3, build_curve, build_mesh, unit

PRESET_NAMES = ("figeight_w1", "trefoil_standard", "mixed_chirality_contour", "model_cusp")


@dataclass(frozen=True)
class GeneratorParams:
    """Sampling resolution and radii for the generators.

    samples_core counts samples along a core curve (or around the big
    circle of a torus); samples_tube counts samples around a tube.
    tube_radius of None lets each generator pick its default.
    """

    samples_core: int = 96
    samples_tube: int = 24
    tube_radius: float | None = None
    major_radius: float = 2.5
    minor_radius: float = 1.0

    def check(self):
        if self.samples_core < 12 or self.samples_tube < 8:
            raise ResolutionTooLow(
                f"need samples_core >= 12 and samples_tube >= 8, got {self.samples_core}, {self.samples_tube}"
            )
        if not 0 < self.minor_radius < self.major_radius:
            raise ValueError("need 0 < minor_radius < major_radius")
        if self.tube_radius is not None and self.tube_radius <= 0:
            raise ValueError("tube_radius must be positive")
        return self


def _orient_outward(vertices, faces):
    """Flip all faces if the signed volume is negative."""
    v = np.asarray(vertices, dtype=float)
    f = np.asarray(faces, dtype=np.int64)
    vol = np.einsum("ij,ij->i", v[f[:, 0]], np.cross(v[f[:, 1]], v[f[:, 2]])).sum() / 6.0
    if vol < 0:
        f = f[:, ::-1]
    return f


# --- sphere -----------------------------------------------------------------

def _octasphere(subdiv, radius=1.0):
    verts = [
        (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1),
    ]
    faces = [
        (0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
        (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5),
    ]
    verts = [np.array(v, dtype=float) for v in verts]
    for _ in range(subdiv):
        cache = {}
        new_faces = []

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = unit(verts[a] + verts[b])
                cache[key] = len(verts)
                verts.append(m)
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    v = radius * np.array(verts)
    return v, np.array(faces, dtype=np.int64)


# --- torus -------------------------------------------------------------------

def _torus_grid(n, m, R, a):
    # phi runs clockwise in the (radial, z) half-plane so that a curve
    # advancing in both angles carries surface linking +p*q.
    th = 2 * np.pi * np.arange(n) / n
    ph = 2 * np.pi * np.arange(m) / m
    T, P = np.meshgrid(th, ph, indexing="ij")
    x = (R + a * np.cos(P)) * np.cos(T)
    y = (R + a * np.cos(P)) * np.sin(T)
    z = -a * np.sin(P)
    verts = np.stack([x, y, z], axis=-1).reshape(-1, 3)

    def vid(i, j):
        return (i % n) * m + (j % m)

    faces = []
    for i in range(n):
        for j in range(m):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v11, v01 = vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((v00, v10, v11))   # lower triangle of the quad
            faces.append((v00, v11, v01))   # upper triangle
    return verts, np.array(faces, dtype=np.int64)


def torus_with_curve(p, q, params=None):
    """A (p, q) curve on the standard torus, anchored exactly to faces.

    The curve wraps p times around the axis and q times around the tube.
    Samples are placed at a uniform base resolution plus every crossing
    of a parameter grid line or cell diagonal, then mapped through the
    affine map of the triangle they land in, so each sample lies exactly
    on its anchor and consecutive anchors are always the same face or
    edge-adjacent faces.
    """
    params = (params or GeneratorParams()).check()
    p, q = int(p), int(q)
    if p == 0 and q == 0:
        raise ValueError("(0, 0) is not a curve")
    if math.gcd(abs(p), abs(q)) > 1:
        raise ValueError("p and q must be coprime")
    n, m = params.samples_core, params.samples_tube
    R, a = params.major_radius, params.minor_radius
    verts, faces = _torus_grid(n, m, R, a)
    mesh = build_mesh(verts, _orient_outward(verts, faces))

    # Incommensurate phase offsets keep the curve line off grid corners,
    # so every face boundary it crosses gets its own on-edge sample.
    th_off, ph_off = 0.318310 / n, 0.271828 / m
    ts = [(np.arange(params.samples_core) + 0.5) / params.samples_core]
    if p != 0:
        ks = np.arange(n * abs(p))
        ts.append(np.mod((ks / n - th_off) / p, 1.0))
    if q != 0:
        ks = np.arange(m * abs(q))
        ts.append(np.mod((ks / m - ph_off) / q, 1.0))
    denom = p * n - q * m
    if denom != 0:
        ds = np.arange(abs(denom))
        ts.append(np.mod((ds - n * th_off + m * ph_off) / denom, 1.0))
    t = np.unique(np.concatenate(ts))
    # merge float-coincident parameters (grid-corner crossings)
    keep = np.ones(len(t), dtype=bool)
    keep[1:] = np.diff(t) > 1e-12
    t = t[keep]
    if t[0] + 1.0 - t[-1] <= 1e-12:
        t = t[:-1]

    th = p * t + th_off   # in units of full turns
    ph = q * t + ph_off
    # Anchor each sample to the triangle carrying the arc that follows
    # it (located at the interval midpoint, which no crossing family can
    # hit); crossing samples then sit exactly on that triangle's
    # boundary, so consecutive anchors share at least an edge.
    tm = np.concatenate([0.5 * (t[:-1] + t[1:]), [0.5 * (t[-1] + t[0] + 1.0)]])
    iw = np.floor((p * tm + th_off) * n).astype(int)   # unwrapped cells
    jw = np.floor((q * tm + ph_off) * m).astype(int)
    u_cell = th * n - iw
    v_cell = ph * m - jw
    lower = (p * tm + th_off) * n - iw >= (q * tm + ph_off) * m - jw

    samples = np.empty((len(t), 3))
    anchors = np.empty(len(t), dtype=np.int64)
    for k in range(len(t)):
        i, j, u, v = iw[k] % n, jw[k] % m, u_cell[k], v_cell[k]
        p00 = verts[(i % n) * m + (j % m)]
        p10 = verts[((i + 1) % n) * m + (j % m)]
        p11 = verts[((i + 1) % n) * m + ((j + 1) % m)]
        p01 = verts[(i % n) * m + ((j + 1) % m)]
        quad = 2 * (i * m + j)
        if lower[k]:
            samples[k] = (1 - u) * p00 + (u - v) * p10 + v * p11
            anchors[k] = quad
        else:
            samples[k] = (1 - v) * p00 + u * p11 + (v - u) * p01
            anchors[k] = quad + 1
    curve = build_curve(samples)
    return CurveOnSurface(curve, anchors, mesh)


# --- higher genus -------------------------------------------------------------

def _chain_field(g, spacing=2.5):
    """Distance to a chain of g unit circles joined by straight bridges."""
    centers = spacing * np.arange(g)

    def field(pts):
        pts = np.atleast_2d(pts)
        d = np.full(len(pts), np.inf)
        for cx in centers:
            rad = np.hypot(pts[:, 0] - cx, pts[:, 1])
            d = np.minimum(d, np.abs(rad - 1.0))
        for cx in centers[:-1]:
            x0, x1 = cx + 1.0, cx + spacing - 1.0
            t = np.clip((pts[:, 0] - x0) / (x1 - x0), 0.0, 1.0)
            d = np.minimum(d, np.hypot(pts[:, 0] - (x0 + t * (x1 - x0)), pts[:, 1]))
        return d

    return field, centers


def _resample_loop(loop, step):
    """Uniformly resample a closed polyline at approximately `step`."""
    if np.linalg.norm(loop[0] - loop[-1]) < 1e-12:
        loop = loop[:-1]
    seg = np.roll(loop, -1, axis=0) - loop
    lens = np.linalg.norm(seg, axis=1)
    L = lens.sum()
    npts = max(12, int(round(L / step)))
    s = np.concatenate([[0.0], np.cumsum(lens)])
    targets = L * np.arange(npts) / npts
    idx = np.searchsorted(s, targets, side="right") - 1
    idx = np.clip(idx, 0, len(loop) - 1)
    frac = (targets - s[idx]) / np.where(lens[idx] > 0, lens[idx], 1.0)
    return loop[idx] + frac[:, None] * seg[idx]


def _genus_mesh(g, params):
    """Double graph-lift of the planar tube neighborhood of a chain of
    circles: genus g, fold curve exactly the g+1 boundary loops."""
    r = params.tube_radius if params.tube_radius is not None else 0.18
    if not 0.05 <= r <= 0.45:
        raise TubeTooFat(f"handle radius {r} outside the supported range [0.05, 0.45]")
    field, centers = _chain_field(g)
    h_b = 2 * np.pi * (1 + r) / params.samples_core
    h_i = 2.0 * h_b

    # trace the g+1 boundary loops of {field <= r} with marching squares
    pad = 3 * h_b
    x0, x1 = -1 - r - pad, centers[-1] + 1 + r + pad
    y0, y1 = -1 - r - pad, 1 + r + pad
    hs = 0.5 * h_b
    xs = np.arange(x0, x1 + hs, hs)
    ys = np.arange(y0, y1 + hs, hs)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    grid = field(np.stack([X.ravel(), Y.ravel()], axis=1)).reshape(X.shape) - r
    loops = measure.find_contours(grid, 0.0)
    if len(loops) != g + 1:
        raise ResolutionTooLow(f"traced {len(loops)} boundary loops, expected {g + 1}")
    boundary = []
    for lp in loops:
        pts = np.stack([x0 + lp[:, 0] * hs, y0 + lp[:, 1] * hs], axis=1)
        boundary.append(_resample_loop(pts, h_b))
    bpts = np.concatenate(boundary)
    nb = len(bpts)

    # interior grid, culled away from the boundary band
    gx = np.arange(x0, x1, h_i)
    gy = np.arange(y0, y1, h_i)
    GX, GY = np.meshgrid(gx, gy, indexing="ij")
    GX = GX + (np.arange(len(gy)) % 2)[None, :] * 0.5 * h_i   # staggered rows
    ipts = np.stack([GX.ravel(), GY.ravel()], axis=1)
    di = field(ipts)
    ipts = ipts[di <= r - 0.9 * h_b]

    pts2 = np.concatenate([bpts, ipts])
    tri = Delaunay(pts2)
    simp = tri.simplices
    cent = pts2[simp].mean(axis=1)
    simp = simp[field(cent) < r]
    # orient all planar triangles counterclockwise
    e1 = pts2[simp[:, 1]] - pts2[simp[:, 0]]
    e2 = pts2[simp[:, 2]] - pts2[simp[:, 0]]
    flip = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) < 0
    simp[flip] = simp[flip][:, [0, 2, 1]]

    # split triangles whose three corners all sit on the fold circle,
    # otherwise their top and bottom copies would coincide
    extra_pts = []
    out = []
    next_id = len(pts2)
    for tri_ids in simp:
        if (tri_ids < nb).all():
            c = pts2[tri_ids].mean(axis=0)
            extra_pts.append(c)
            a, b, cc = tri_ids
            out += [(a, b, next_id), (b, cc, next_id), (cc, a, next_id)]
            next_id += 1
        else:
            out.append(tuple(tri_ids))
    if extra_pts:
        pts2 = np.concatenate([pts2, np.array(extra_pts)])
    simp = np.array(out, dtype=np.int64)

    used = np.unique(simp)
    if (used[used < nb].size) != nb:
        raise ResolutionTooLow("boundary sampling left unused fold vertices")

    # lift: boundary points stay single at z=0, interior points split
    # into +z and -z copies
    remap = -np.ones(len(pts2), dtype=np.int64)
    verts = []
    top_id = np.empty(len(pts2), dtype=np.int64)
    bot_id = np.empty(len(pts2), dtype=np.int64)
    for pid in used:
        x, y = pts2[pid]
        if pid < nb:
            remap[pid] = len(verts)
            verts.append((x, y, 0.0))
            top_id[pid] = bot_id[pid] = remap[pid]
        else:
            z = math.sqrt(max(r * r - float(field(pts2[pid][None])[0]) ** 2, 0.0))
            if z <= 0:
                raise ResolutionTooLow("interior point landed on the fold circle")
            top_id[pid] = len(verts)
            verts.append((x, y, z))
            bot_id[pid] = len(verts)
            verts.append((x, y, -z))
    faces = []
    for a, b, c in simp:
        faces.append((top_id[a], top_id[b], top_id[c]))
        faces.append((bot_id[a], bot_id[c], bot_id[b]))
    verts = np.array(verts, dtype=float)
    faces = np.array(faces, dtype=np.int64)
    mesh = build_mesh(verts, _orient_outward(verts, faces))
    if mesh.euler_characteristic != 2 - 2 * g:
        raise ResolutionTooLow(
            f"Euler characteristic {mesh.euler_characteristic}, expected {2 - 2 * g}"
        )
    return mesh


def standard_surface(genus, params=None):
    """Standard closed orientable surface of the given genus.

    genus 0 is a subdivided-octahedron sphere, genus 1 the parametric
    torus, genus >= 2 a symmetric double lift over a thickened chain of
    circles.  Profile components under vertical projection: genus + 1.
    """
    params = (params or GeneratorParams()).check()
    genus = int(genus)
    if genus < 0:
        raise ValueError("genus must be >= 0")
    if genus == 0:
        subdiv = max(2, int(round(math.log2(max(params.samples_core, 16) / 12))))
        v, f = _octasphere(subdiv)
        return build_mesh(v, _orient_outward(v, f))
    if genus == 1:
        v, f = _torus_grid(params.samples_core, params.samples_tube,
                           params.major_radius, params.minor_radius)
        return build_mesh(v, _orient_outward(v, f))
    return _genus_mesh(genus, params)


# --- tubes --------------------------------------------------------------------

def _vertical_aligned_frames(points):
    """Normal frames whose first axis is horizontal (tangent x vertical).

    A thin tube built on these frames has its fold curves at ring
    angles 0 and pi for every ring, so with ring vertices placed at
    integer slots the fold path runs along two vertex lines and every
    fold vertex meets exactly two fold edges.  A twisting frame instead
    sweeps the fold around the tube with tight reversals that pin
    vertex stars (a vertex meeting 3+ fold edges), which no small rigid
    rotation can undo.  Requires the tangent never vertical.
    """
    seg = np.roll(points, -1, axis=0) - points
    dirs = unit(seg)
    T = unit(np.roll(dirs, 1, axis=0) + dirs)
    h = np.cross(T, np.array([0.0, 0.0, 1.0]))
    hn = np.linalg.norm(h, axis=1)
    if hn.min() < 1e-9:
        raise ValueError("core tangent is vertical; tube folds degenerate")
    U = h / hn[:, None]
    W = np.cross(T, U)
    return U, W


def tube_around_knot(core, radius=None, params=None):
    """Boundary torus of a tube of the given radius around a core curve.

    Requires radius < half the core's minimum feature size (TubeTooFat
    otherwise); the mesh is fully revalidated, so a sweep that collides
    with itself also fails.
    """
    params = (params or GeneratorParams()).check()
    mfs = core.min_feature_size()
    r = radius if radius is not None else 0.3 * mfs
    if r <= 0:
        raise ValueError("radius must be positive")
    if r >= 0.5 * mfs:
        raise TubeTooFat(f"radius {r:.3g} >= half feature size {0.5 * mfs:.3g}")
    n = len(core)
    m = params.samples_tube
    U, W = _vertical_aligned_frames(core.samples)
    # Ring vertices start at angle 0: with the aligned frames the exact
    # tube normal at ring angle a is cos(a) U + sin(a) W, so the fold
    # lines (horizontal normal) sit at angles 0 and pi, along the slot-0
    # and slot-m/2 vertex lines; every fold vertex then meets exactly
    # two fold edges and the projection stays generic.
    ang = 2 * np.pi * np.arange(m) / m
    ring = (np.cos(ang)[None, :, None] * U[:, None, :]
            + np.sin(ang)[None, :, None] * W[:, None, :])
    verts = (core.samples[:, None, :] + r * ring).reshape(-1, 3)

    def vid(i, j):
        return (i % n) * m + (j % m)

    faces = []
    for i in range(n):
        for j in range(m):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v11, v01 = vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    faces = _orient_outward(verts, np.array(faces, dtype=np.int64))
    try:
        return build_mesh(verts, faces)
    except Exception as e:
        raise TubeTooFat(f"tube of radius {r:.3g} self-collides: {e}") from e


# --- presets -------------------------------------------------------------------

def _closed_samples(fn, n):
    t = 2 * np.pi * (np.arange(n) + 0.5) / n
    return np.stack(fn(t), axis=1)


def _figeight_curve(n):
    # planar figure eight lifted so the lobe crossing resolves to +1
    return build_curve(_closed_samples(
        lambda t: (np.sin(2 * t), np.sin(t), -0.25 * np.cos(t)), n))


def _trefoil_curve(n):
    return build_curve(_closed_samples(
        lambda t: (np.sin(t) + 2 * np.sin(2 * t),
                   np.cos(t) - 2 * np.cos(2 * t),
                   -np.sin(3 * t)), n))


def _model_cusp_curve():
    """Closed curve containing the model cusp (t^2, t^3, t) at t=0.

    A second copy of the cusp arc, rotated half a turn about the
    vertical axis, closes the curve with two cusps of equal chirality
    (a closed curve with an odd cusp count admits no continuous
    horizontal framing).
    """
    a, D = 0.8, 4.0
    t = np.linspace(-a, a, 9)
    arc1 = np.stack([t * t, t ** 3, t], axis=1)
    arc2 = np.stack([D - t * t, -(t ** 3), t], axis=1)
    c1 = np.array([
        [1.4, 0.60, 0.45],
        [2.0, 0.65, 0.0],
        [2.6, 0.60, -0.45],
    ])
    c2 = np.array([
        [2.6, -0.60, 0.45],
        [2.0, -0.65, 0.0],
        [1.4, -0.60, -0.45],
    ])
    samples = np.concatenate([arc1, c1, arc2, c2])
    return build_curve(samples, cusp_marks=(4, 16))


def _mixed_chirality_diagram():
    pts = np.array([
        [1.0, -0.2], [1.8, 0.0], [1.0, 0.2], [0.85, 0.7], [0.8, 2.6],
        [1.0, 2.2], [1.8, 2.0], [1.0, 1.8], [2.4, 1.7], [2.4, 2.9],
        [0.2, 2.9], [-0.4, 1.0], [-0.4, -0.6], [0.5, -0.6],
    ])
    strand = np.hstack([pts, np.zeros((len(pts), 1))])
    cusps = []
    for v in (1, 6):
        chir = cusp_chirality(strand[v - 1], strand[v], strand[v + 1])
        cusps.append(CuspPoint(strand=0, vertex=v, chirality=chir))
    return PlanarDiagram([strand], crossings=(), cusps=cusps)


def preset(name, params=None):
    """Published example inputs.

    figeight_w1 and trefoil_standard are curves, model_cusp is a curve
    with marked cusps, mixed_chirality_contour is a planar diagram.
    """
    params = (params or GeneratorParams()).check()
    n = params.samples_core
    if name == "figeight_w1":
        return _figeight_curve(n)
    if name == "trefoil_standard":
        return _trefoil_curve(n)
    if name == "model_cusp":
        return _model_cusp_curve()
    if name == "mixed_chirality_contour":
        return _mixed_chirality_diagram()
    raise UnknownPreset(f"unknown preset {name!r}; choose from {PRESET_NAMES}")


def twin_projection_cores(params=None):
    """Two cores with the same planar projection but different knot type.

    The first has a single-peak height function (an unknot), the second
    is the standard trefoil; their shadows coincide, so tube profiles
    built from them have near-identical projections while the linking
    invariants differ.  Experimental demonstration helper.
    """
    params = (params or GeneratorParams()).check()
    n = params.samples_core
    unknot = build_curve(_closed_samples(
        lambda t: (np.sin(t) + 2 * np.sin(2 * t),
                   np.cos(t) - 2 * np.cos(2 * t),
                   np.sin(t)), n))
    return unknot, _trefoil_curve(n)

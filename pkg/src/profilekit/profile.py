"""Profile curve extraction.

A fold edge of a mesh separates an upward face (normal with positive z)
from a downward face.  Under vertical projection the fold edges map to
the apparent outline.  Directed by the traversal of their upward face,
fold edges are exactly the boundary cycles of the upward region, which
chains them into closed curves and fixes a canonical orientation.

Samples are fold-edge midpoints anchored to the upward face (the
midpoint lies on the shared edge, hence on both faces).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagram import RETRIES, RETRY_BASE, _child_seed, cusp_chirality, linking_number
from .errors import AmbiguousCusp, DegenerateProjection, PersistentDegeneracy
from .framing import writhe_definitional
from .geom import CurveOnSurface, build_curve, perturb

NZ_TOL = 1e-9            # face-normal z magnitude below this is degenerate
VERTICAL_COS = 0.95      # segment |dir_z| above this corroborates a cusp
MAX_VERTICAL_RUN = 3     # longer near-vertical runs cannot be localized


class ProfileCurve(CurveOnSurface):
    """One profile component: a curve-on-surface with component id and
    detected cusps (sample index, chirality)."""

    def __init__(self, curve, anchors, mesh, component_id, cusps):
        super().__init__(curve, anchors, mesh)
        self.component_id = int(component_id)
        self.cusps = tuple(cusps)


def _fold_cycles(mesh):
    """Directed fold edges chained into cycles.

    Returns a list of cycles; each cycle is a list of (tail vertex,
    head vertex, up face index, edge id).  Raises DegenerateProjection
    when the mesh is not generic for the vertical projection.
    """
    nz = mesh.face_normals[:, 2]
    if (np.abs(nz) < NZ_TOL).any():
        raise DegenerateProjection("a face is vertical (normal z ~ 0)")
    edges = mesh.edges
    ef = mesh.edge_faces
    fold = (nz[ef[:, 0]] > 0) != (nz[ef[:, 1]] > 0)
    fids = np.nonzero(fold)[0]
    if len(fids) == 0:
        raise DegenerateProjection("no fold edges (surface does not close up vertically?)")

    counts = np.bincount(edges[fids].ravel(), minlength=len(mesh.vertices))
    if (counts > 2).any():
        raise DegenerateProjection("a vertex meets more than two fold edges")

    out = {}
    for eid in fids:
        a, b = edges[eid]
        f0, f1 = ef[eid]
        up = f0 if nz[f0] > 0 else f1
        fv = mesh.faces[up]
        # the up face traverses exactly one directed version of {a, b}
        tail = head = None
        for k in range(3):
            u, v = fv[k], fv[(k + 1) % 3]
            if (u == a and v == b) or (u == b and v == a):
                tail, head = int(u), int(v)
                break
        if tail is None or tail in out:
            raise DegenerateProjection("fold edges do not chain consistently")
        out[tail] = (head, int(up), int(eid))

    cycles = []
    seen = set()
    for start in sorted(out):
        if start in seen:
            continue
        cyc = []
        v = start
        while True:
            head, up, eid = out[v]
            cyc.append((v, head, up, eid))
            seen.add(v)
            v = head
            if v == start:
                break
            if v in seen or v not in out:
                raise DegenerateProjection("fold edges do not close into cycles")
        cycles.append(cyc)
    # canonical order and starting edge
    for i, cyc in enumerate(cycles):
        k = int(np.argmin([e[3] for e in cyc]))
        cycles[i] = cyc[k:] + cyc[:k]
    cycles.sort(key=lambda c: (-len(c), c[0][3]))
    return cycles


def _cusp_indices(samples):
    """Sample indices where the projected direction reverses.

    Reversal between the two segment directions at a sample is the
    discrete cusp signature; a near-vertical adjacent segment
    corroborates it.  A reversal that lacks corroboration, or sits
    strictly inside a near-vertical run (both adjacent segments
    near-vertical, so the projected jog is noise), or a run too long to
    localize, raises AmbiguousCusp and defers to the perturb-and-retry
    schedule.
    """
    n = len(samples)
    seg = np.roll(samples, -1, axis=0) - samples
    lens = np.linalg.norm(seg, axis=1)
    dirs = seg / lens[:, None]
    pu = dirs[:, :2]
    pl = np.linalg.norm(pu, axis=1)
    if (pl <= 1e-12).any():
        raise AmbiguousCusp("exactly vertical segment on the profile")
    pun = pu / pl[:, None]
    rev = (np.roll(pun, 1, axis=0) * pun).sum(axis=1) < 0
    steep = np.abs(dirs[:, 2]) > VERTICAL_COS   # per segment i -> i+1
    steep_in = np.roll(steep, 1)                # segment arriving at sample i
    t = np.roll(dirs, 1, axis=0) + dirs
    tn = np.linalg.norm(t, axis=1)
    tz = np.abs(t[:, 2]) / np.where(tn > 0, tn, 1.0)
    vert = steep_in | steep | (tz > VERTICAL_COS)

    run = 0
    for i in list(range(n)) + list(range(n)):   # twice around to catch wrapped runs
        if steep_in[i % n] and steep[i % n]:
            run += 1
            if run > MAX_VERTICAL_RUN:
                raise AmbiguousCusp(f"{run} consecutive near-vertical samples around sample {i % n}")
        else:
            run = 0

    out = []
    for i in np.nonzero(rev)[0]:
        if steep_in[i] and steep[i]:
            raise AmbiguousCusp(f"projected reversal inside a near-vertical run at sample {i}")
        if not vert[i]:
            raise AmbiguousCusp(f"projected reversal without a near-vertical tangent at sample {i}")
        out.append(int(i))
    return out


def detect_cusps(obj):
    """Cusps of a profile curve as (sample index, chirality) pairs.

    Accepts a ProfileCurve / CurveOnSurface or a bare curve.  A cusp is
    a reversal of the projected direction, corroborated by a
    near-vertical adjacent segment; AmbiguousCusp when the reversal
    cannot be localized or corroborated.
    """
    samples = obj.curve.samples if hasattr(obj, "curve") else obj.samples
    n = len(samples)
    out = []
    for i in _cusp_indices(samples):
        chir = cusp_chirality(samples[(i - 1) % n], samples[i], samples[(i + 1) % n])
        out.append((i, chir))
    return out


def _extract(mesh):
    cycles = _fold_cycles(mesh)
    profiles = []
    for cid, cyc in enumerate(cycles):
        v = mesh.vertices
        samples = np.array([0.5 * (v[a] + v[b]) for a, b, _, _ in cyc])
        anchors = np.array([up for _, _, up, _ in cyc], dtype=np.int64)
        cusps = []
        marks = _cusp_indices(samples)
        nn = len(samples)
        for i in marks:
            cusps.append((i, cusp_chirality(samples[(i - 1) % nn], samples[i], samples[(i + 1) % nn])))
        curve = build_curve(samples, cusp_marks=marks)
        profiles.append(ProfileCurve(curve, anchors, mesh, cid, cusps))
    return profiles


def extract_profile(mesh, seed=0):
    """All profile components of a mesh, canonically ordered and oriented.

    Non-generic meshes are retried under the seeded perturbation
    schedule; the returned curves reference the mesh actually used
    (`profiles[k].mesh`), which differs from the input only if a retry
    fired.
    """
    last = None
    for k in range(RETRIES + 1):
        m = mesh if k == 0 else perturb(mesh, _child_seed(seed, k), RETRY_BASE * 2 ** (k - 1))
        try:
            return _extract(m)
        except (DegenerateProjection, AmbiguousCusp) as e:
            last = e
    raise PersistentDegeneracy(f"extract_profile: {last}")


@dataclass
class ProfileLinkSummary:
    """Writhes, pairwise linking numbers and cusps of the profile."""

    components: int
    writhes: list
    linking_matrix: list
    cusps: list = field(default_factory=list)

    def to_json(self):
        return {
            "components": self.components,
            "writhes": list(self.writhes),
            "linking_matrix": [list(r) for r in self.linking_matrix],
            "cusps": [
                [{"index": i, "chirality": c} for i, c in comp] for comp in self.cusps
            ],
        }


def profile_link_summary(profiles, seed=0):
    """Writhe of each component plus the pairwise linking matrix.

    Writhes use the framed (push-off) definition so cusped components
    are handled; the matrix diagonal is zero by convention.
    """
    n = len(profiles)
    writhes = [writhe_definitional(p.curve, seed=seed) for p in profiles]
    mat = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            lk = linking_number(profiles[i].curve, profiles[j].curve, seed=seed)
            mat[i][j] = mat[j][i] = lk
    return ProfileLinkSummary(
        components=n,
        writhes=writhes,
        linking_matrix=mat,
        cusps=[list(p.cusps) for p in profiles],
    )

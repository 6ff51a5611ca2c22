"""Vertical projection of curves to planar diagrams, and the diagram
invariants: signed crossings, writhe, linking number.

Projection is along -z onto the xy-plane.  A projection is generic when
crossings are transverse double points away from segment endpoints with
distinct heights.  Non-generic inputs raise DegenerateProjection; the
invariant entry points retry through a seeded schedule of tiny rigid
rotations, which cannot change any of the invariants computed here.

Sign convention: a crossing is +1 when the planar cross product of
(over-strand direction, under-strand direction) is positive.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geom
from .errors import CurvesIntersect, DegenerateProjection, PersistentDegeneracy, ResidualTooLarge
from .geom import PLCurve3, perturb, perturb_jointly, segment_distances, unit

# Genericity floors (see also geom.EMBED_TOL).
PARAM_TOL = 1e-9          # crossing parameter distance from {0,1}
HEIGHT_TOL = 1e-12        # x diameter: distinct heights at a crossing
SEPARATION_TOL = 1e-9     # x diameter: distinct crossing points / parallel gap
RETRIES = 8
RETRY_BASE = 1e-7         # first retry rotation angle (displacement / diameter)

RIGHT = "right"
LEFT = "left"


@dataclass(frozen=True)
class Crossing:
    """Transverse double point of the projected diagram.

    over/under are (strand index, segment index) pairs; point is the
    planar location; sign follows the convention in the module docstring.
    """

    over: tuple
    under: tuple
    point: tuple
    sign: int


@dataclass(frozen=True)
class CuspPoint:
    strand: int
    vertex: int
    chirality: str


class PlanarDiagram:
    """Projected strands plus their crossings and cusps.

    Strand arrays keep the third coordinate so heights at crossings stay
    inspectable after projection.
    """

    def __init__(self, strands, crossings, cusps):
        self.strands = [np.asarray(s, dtype=float) for s in strands]
        self.crossings = tuple(crossings)
        self.cusps = tuple(cusps)

    def self_crossing_sum(self, strand=None):
        """Signed sum of self-crossings (of one strand, or of each strand's own)."""
        total = 0
        for c in self.crossings:
            if c.over[0] == c.under[0] and (strand is None or c.over[0] == strand):
                total += c.sign
        return total

    def inter_crossing_sum(self):
        """Signed sum of crossings between distinct strands."""
        return sum(c.sign for c in self.crossings if c.over[0] != c.under[0])


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def cusp_chirality(prev_pt, cusp_pt, next_pt):
    """Chirality of a cusp from three consecutive planar points.

    The incoming direction u and the chord c across the cusp decide the
    turn: negative planar cross product is a right cusp.
    """
    u = np.asarray(cusp_pt, dtype=float)[:2] - np.asarray(prev_pt, dtype=float)[:2]
    c = np.asarray(next_pt, dtype=float)[:2] - np.asarray(prev_pt, dtype=float)[:2]
    s = float(u[0] * c[1] - u[1] * c[0])
    scale = float(np.linalg.norm(u) * np.linalg.norm(c))
    if abs(s) <= 1e-12 * scale or scale == 0.0:
        raise DegenerateProjection("cusp chirality is not resolved by the projection")
    return RIGHT if s < 0 else LEFT


def _segment_pair_crossings(sa, ia, sb, ib, A0, A1, B0, B1, za, zan, zb, zbn, diam):
    """Crossing records for one batch of candidate segment pairs."""
    d1 = A1 - A0
    d2 = B1 - B0
    r = B0 - A0
    denom = _cross2(d1, d2)
    l1 = np.linalg.norm(d1, axis=1)
    l2 = np.linalg.norm(d2, axis=1)
    parallel = np.abs(denom) <= 1e-12 * l1 * l2
    safe = np.where(parallel, 1.0, denom)
    t = np.where(parallel, -1.0, _cross2(r, d2) / safe)
    u = np.where(parallel, -1.0, _cross2(r, d1) / safe)

    interior = (t > PARAM_TOL) & (t < 1 - PARAM_TOL) & (u > PARAM_TOL) & (u < 1 - PARAM_TOL)
    grazing = (
        ~parallel
        & ~interior
        & (t > -PARAM_TOL) & (t < 1 + PARAM_TOL)
        & (u > -PARAM_TOL) & (u < 1 + PARAM_TOL)
    )
    if grazing.any():
        raise DegenerateProjection("crossing at or within tolerance of a segment endpoint")

    if parallel.any():
        pm = np.nonzero(parallel)[0]
        z = np.zeros((len(pm), 1))
        gap = segment_distances(
            np.hstack([A0[pm], z]), np.hstack([A1[pm], z]),
            np.hstack([B0[pm], z]), np.hstack([B1[pm], z]),
        )
        if (gap <= SEPARATION_TOL * diam).any():
            raise DegenerateProjection("overlapping parallel segments in projection")

    out = []
    for k in np.nonzero(interior)[0]:
        ha = za[k] + t[k] * (zan[k] - za[k])
        hb = zb[k] + u[k] * (zbn[k] - zb[k])
        if abs(ha - hb) < HEIGHT_TOL * diam:
            raise DegenerateProjection("equal heights at a crossing")
        pt = tuple(A0[k] + t[k] * d1[k])
        if ha > hb:
            over, under, od, ud = (sa, int(ia[k])), (sb, int(ib[k])), d1[k], d2[k]
        else:
            over, under, od, ud = (sb, int(ib[k])), (sa, int(ia[k])), d2[k], d1[k]
        sign = 1 if _cross2(od, ud) > 0 else -1
        out.append(Crossing(over=over, under=under, point=pt, sign=sign))
    return out


def project(curves):
    """Project curves vertically onto the xy-plane.

    Accepts one curve or a sequence.  Returns a PlanarDiagram whose
    cusps carry chirality; raises DegenerateProjection when the
    projection is not generic.
    """
    if isinstance(curves, PLCurve3):
        curves = [curves]
    curves = list(curves)
    if not curves:
        raise ValueError("need at least one curve")
    strands = [c.samples for c in curves]
    allpts = np.concatenate(strands)
    diam = float(np.linalg.norm(allpts.max(axis=0) - allpts.min(axis=0)))
    if diam == 0:
        raise DegenerateProjection("zero-diameter input")

    crossings = []
    for sa in range(len(strands)):
        for sb in range(sa, len(strands)):
            P = strands[sa]
            Q = strands[sb]
            Pn = np.roll(P, -1, axis=0)
            Qn = np.roll(Q, -1, axis=0)
            if sa == sb:
                n = len(P)
                i, j = np.triu_indices(n, k=2)
                keep = ~((i == 0) & (j == n - 1))
                i, j = i[keep], j[keep]
            else:
                i, j = np.meshgrid(np.arange(len(P)), np.arange(len(Q)), indexing="ij")
                i, j = i.ravel(), j.ravel()
            if len(i) == 0:
                continue
            crossings.extend(
                _segment_pair_crossings(
                    sa, i, sb, j,
                    P[i, :2], Pn[i, :2], Q[j, :2], Qn[j, :2],
                    P[i, 2], Pn[i, 2], Q[j, 2], Qn[j, 2],
                    diam,
                )
            )

    if len(crossings) > 1:
        pts = np.array([c.point for c in crossings])
        dif = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((dif * dif).sum(axis=2))
        np.fill_diagonal(dist, np.inf)
        if (dist < SEPARATION_TOL * diam).any():
            raise DegenerateProjection("two crossings coincide (triple point)")

    cusps = []
    for s, c in enumerate(curves):
        n = len(c)
        for v in c.cusp_marks:
            chir = cusp_chirality(c.samples[(v - 1) % n], c.samples[v], c.samples[(v + 1) % n])
            cusps.append(CuspPoint(strand=s, vertex=int(v), chirality=chir))

    return PlanarDiagram(strands, crossings, cusps)


def _child_seed(seed, k):
    return (1000003 * (int(seed) & (2**31 - 1)) + 10007 * k + 12345) % (2**63 - 1)


def writhe(curve, seed=0):
    """Writhe: signed count of self-crossings of a generic projection.

    Degenerate projections are retried with seeded rotations of angle
    RETRY_BASE * 2^k; raises PersistentDegeneracy when all fail.
    """
    last = None
    for k in range(RETRIES + 1):
        c = curve if k == 0 else perturb(curve, _child_seed(seed, k), RETRY_BASE * 2 ** (k - 1))
        try:
            return project(c).self_crossing_sum()
        except DegenerateProjection as e:
            last = e
    raise PersistentDegeneracy(f"writhe: {last}")


def _check_disjoint(a, b):
    P, Q = a.samples, b.samples
    allpts = np.concatenate([P, Q])
    diam = float(np.linalg.norm(allpts.max(axis=0) - allpts.min(axis=0)))
    Pn = np.roll(P, -1, axis=0)
    Qn = np.roll(Q, -1, axis=0)
    i, j = np.meshgrid(np.arange(len(P)), np.arange(len(Q)), indexing="ij")
    d = segment_distances(P[i.ravel()], Pn[i.ravel()], Q[j.ravel()], Qn[j.ravel()])
    if float(d.min()) <= geom.EMBED_TOL * diam:
        raise CurvesIntersect(f"curves come within {float(d.min()):.3g} of each other")


def linking_number(a, b, seed=0):
    """Linking number: half the signed inter-strand crossing count.

    Retries rotate the pair jointly (one rigid motion for both curves),
    which preserves the linking number exactly, so the retry schedule
    can only repair degeneracy, never change the answer.
    """
    _check_disjoint(a, b)
    last = None
    for k in range(RETRIES + 1):
        if k == 0:
            aa, bb = a, b
        else:
            aa, bb = perturb_jointly([a, b], _child_seed(seed, k), RETRY_BASE * 2 ** (k - 1))
        try:
            total = project([aa, bb]).inter_crossing_sum()
        except DegenerateProjection as e:
            last = e
            continue
        if total % 2 != 0:
            raise RuntimeError("internal error: odd signed inter-strand crossing count")
        return total // 2
    raise PersistentDegeneracy(f"linking_number: {last}")


def _spherical_triangle_area(a, b, c):
    # van Oosterom-Strackee: signed solid angle of a spherical triangle.
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = (
        1.0
        + np.einsum("...i,...i->...", a, b)
        + np.einsum("...i,...i->...", b, c)
        + np.einsum("...i,...i->...", c, a)
    )
    return 2.0 * np.arctan2(num, den)


def linking_number_gauss(a, b):
    """Linking number via the Gauss map degree; no projection involved.

    For each segment pair the direction from curve a to curve b sweeps a
    spherical quadrilateral; the signed areas total 4*pi times the
    linking number.  Raises ResidualTooLarge when the sum lands farther
    than 0.25 from an integer.
    """
    _check_disjoint(a, b)
    P = a.samples
    Q = b.samples
    Pn = np.roll(P, -1, axis=0)
    Qn = np.roll(Q, -1, axis=0)
    # corners of the swept quadrilateral, indexed (i on a, j on b)
    g00 = unit(Q[None, :, :] - P[:, None, :])
    g10 = unit(Q[None, :, :] - Pn[:, None, :])
    g11 = unit(Qn[None, :, :] - Pn[:, None, :])
    g01 = unit(Qn[None, :, :] - P[:, None, :])
    area = _spherical_triangle_area(g00, g10, g11) + _spherical_triangle_area(g00, g11, g01)
    total = float(area.sum()) / (4.0 * np.pi)
    nearest = round(total)
    if abs(total - nearest) > 0.25:
        raise ResidualTooLarge(f"Gauss sum {total:.6f} is not near an integer")
    return int(nearest)

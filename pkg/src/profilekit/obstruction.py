"""Decision procedures on curves-on-surfaces.

check_realizable decides whether a surface can be isotoped, fixing the
curve pointwise, until the curve becomes a profile curve: this holds
exactly when writhe equals surface linking number (and, for cusped
curves, when the cusp count is even with uniform chirality).
ri_correct closes a writhe deficit by inserting verified kinks
(Reidemeister I moves) where the curve crosses a fold edge.
check_contour tests the cusp parity/chirality laws on a planar diagram,
and exclude_surfaces applies writhe-based rules that rule out surface
classes as generators of a given profile curve.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagram import cusp_chirality, writhe
from .errors import NoRoomForKink, InsufficientFacts, ProfileKitError
from .framing import surface_linking, writhe_definitional
from .geom import CurveOnSurface, build_curve

# kink projected depth as a fraction of the lesser face depth
KINK_SCALES = (0.15, 0.10, 0.22)
KINK_DEPTH_CLEAR = 2.2   # junction projected depth / kink projected depth
KINK_MAX_REMOVED = 4     # samples a splice may consume per side
KINK_TURN_COS = -0.5     # reject candidate turns sharper than 120 deg

# kink pattern in projected units, (zeta, y): |zeta| is the distance
# from the fold edge line (in kink depths; zeta<0 on the entry face,
# zeta>0 on the exit face), y runs along the projected edge.  The path
# overshoots along the edge while diving, bounces gently off the edge
# line, and climbs back across the dive, so the folded image has
# exactly one transversal self-crossing (near (0.59, 0.96)) and every
# interior turn stays below about 95 degrees.
KINK_PATTERN = (
    (-1.05, 0.55),
    (-0.45, 0.80),
    (-0.10, 0.55),
    (0.00, 0.10),
    (0.12, -0.35),
    (0.60, -0.20),
    (1.10, 0.90),
)


@dataclass(frozen=True)
class Exclusion:
    """A surface class ruled out as generator, with the rule's reason."""

    surface_class: str
    reason: str

    def to_json(self):
        return {"class": self.surface_class, "reason": self.reason}


@dataclass(frozen=True)
class DiagramFacts:
    """Caller-supplied facts about a diagram.  Knot type is declared,
    never computed; counts come from a projection."""

    crossings: int | None = None
    cusps: int | None = None
    knot_type: str | None = None
    sign_unknown: bool = False


@dataclass(frozen=True)
class ObstructionReport:
    writhe: int
    surface_linking: int
    realizable: bool
    deficit: int
    cusp_summary: dict
    exclusions: tuple = ()

    def to_json(self):
        return {
            "writhe": self.writhe,
            "surface_linking": self.surface_linking,
            "realizable": self.realizable,
            "deficit": self.deficit,
            "cusp_summary": dict(self.cusp_summary),
            "exclusions": [e.to_json() for e in self.exclusions],
        }


@dataclass(frozen=True)
class ContourVerdict:
    passed: bool
    failures: tuple
    cusp_count: int
    chiralities: tuple
    orientable: bool

    def to_json(self):
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "failures": list(self.failures),
            "cusp_count": self.cusp_count,
            "chiralities": list(self.chiralities),
            "orientable": self.orientable,
        }


def _cusp_data(curve):
    samples = curve.samples
    n = len(samples)
    chirs = []
    for i in sorted(curve.cusp_marks):
        chirs.append(cusp_chirality(samples[(i - 1) % n], samples[i], samples[(i + 1) % n]))
    return sorted(curve.cusp_marks), chirs


def check_realizable(c: CurveOnSurface, seed: int = 0) -> ObstructionReport:
    """Report whether the host surface can be isotoped, fixing the
    curve, so the curve becomes a profile curve: true iff writhe equals
    surface linking number and the cusp laws hold.

    Cusp-law violations (odd count or mixed chirality) make the curve
    unrealizable outright; the report then carries the crossing-sum
    writhe, since no continuous horizontal framing exists.
    """
    marks, chirs = _cusp_data(c.curve)
    even = len(marks) % 2 == 0
    uniform = len(set(chirs)) <= 1
    laws_ok = even and uniform
    summary = {
        "count": len(marks),
        "even": even,
        "uniform": uniform,
        "chiralities": list(chirs),
    }
    lam = surface_linking(c, seed=seed)
    if laws_ok:
        w = writhe_definitional(c.curve, seed=seed)
    else:
        w = writhe(c.curve, seed=seed)
        summary["note"] = "cusp law violated; writhe from crossing sum"
    deficit = lam - w
    return ObstructionReport(
        writhe=w,
        surface_linking=lam,
        realizable=laws_ok and deficit == 0,
        deficit=deficit,
        cusp_summary=summary,
        exclusions=tuple(exclude_surfaces(w, DiagramFacts())),
    )


def check_contour(d, orientable_neighborhood: bool = True) -> ContourVerdict:
    """Test a single-strand diagram against the cusp laws: even cusp
    count for a two-sided (annular) neighborhood, odd for a one-sided
    (Mobius) one, and uniform chirality either way."""
    if len(d.strands) != 1:
        raise ValueError("check_contour expects a single-strand diagram")
    chirs = tuple(c.chirality for c in d.cusps)
    count = len(chirs)
    failures = []
    if orientable_neighborhood and count % 2 == 1:
        failures.append(f"odd cusp count ({count}) on a two-sided curve")
    if not orientable_neighborhood and count % 2 == 0:
        failures.append(f"even cusp count ({count}) on a one-sided curve")
    if len(set(chirs)) > 1:
        failures.append("mixed cusp chirality: " + ", ".join(chirs))
    return ContourVerdict(
        passed=not failures,
        failures=tuple(failures),
        cusp_count=count,
        chiralities=chirs,
        orientable=orientable_neighborhood,
    )


def exclude_surfaces(w: int, facts: DiagramFacts) -> list:
    """Rule-based exclusions of generating surface classes.

    Uses only the writhe (possibly up to sign) plus caller-declared
    facts; raises InsufficientFacts when a declared knot type needs
    counts that were not supplied.
    """
    out = []
    if w != 0:
        shown = f"|writhe| = {abs(w)}" if facts.sign_unknown else f"writhe {w}"
        out.append(Exclusion(
            "sphere",
            f"{shown} is nonzero, but every curve on a sphere bounds a disk there, "
            "so its surface linking number is 0, and a profile curve must have "
            "writhe equal to surface linking number",
        ))
    if facts.knot_type == "unknot" and abs(w) == 1:
        out.append(Exclusion(
            "knotted torus",
            "writhe +-1 forces nonzero surface linking, so the curve neither bounds "
            "a disk on the torus nor is a meridian; an essential non-meridional "
            "curve that is unknotted can only lie on an unknotted torus",
        ))
    if facts.knot_type == "trefoil":
        if facts.crossings is None or facts.cusps is None:
            raise InsufficientFacts(
                "the trefoil rule needs the diagram's crossing and cusp counts")
        if facts.crossings + facts.cusps < 6:
            out.append(Exclusion(
                "unknotted torus",
                f"a trefoil on an unknotted torus has surface linking 0 (mod 6), but a "
                f"trefoil diagram with {facts.crossings} crossings and {facts.cusps} cusps "
                "has writhe nonzero (mod 6), so writhe cannot equal surface linking",
            ))
    return out


# ---------------------------------------------------------------------------
# kink insertion (Reidemeister I on the surface)

def _fold_sites(c: CurveOnSurface):
    """Indices i where consecutive anchors flip across a fold edge they
    share; yields (i, edge vertex pair) largest-edge first."""
    mesh = c.mesh
    nz = mesh.face_normals[:, 2]
    n = len(c.anchors)
    sites = []
    for i in range(n):
        f0 = int(c.anchors[i])
        f1 = int(c.anchors[(i + 1) % n])
        if f0 == f1 or (nz[f0] > 0) == (nz[f1] > 0):
            continue
        shared = sorted(set(mesh.faces[f0]) & set(mesh.faces[f1]))
        if len(shared) != 2:
            continue
        ev = mesh.vertices[shared]
        sites.append((-float(np.linalg.norm(ev[1] - ev[0])), i, tuple(shared)))
    sites.sort()
    return [(i, e) for _, i, e in sites]


def _rotated_curve_data(c, shift):
    n = len(c.anchors)
    idx = (np.arange(n) + shift) % n
    samples = c.curve.samples[idx]
    anchors = c.anchors[idx]
    marks = sorted((m - shift) % n for m in c.curve.cusp_marks)
    return samples, anchors, marks


def _kink_candidate(c, site_i, edge, depth_frac, mirror):
    """Build the spliced sample/anchor arrays for one kink candidate, or
    None when the local geometry leaves no room.

    The kink is laid out in projected coordinates (xi along the
    projected fold edge, eta perpendicular, toward the side both faces
    fold onto): per-face shear and depth are normalized away so the
    projected kink is exactly the isotropic pattern, with its single
    transversal self-crossing, regardless of how obliquely the two
    faces project.
    """
    mesh = c.mesh
    n = len(c.anchors)
    f_from = int(c.anchors[site_i])
    f_to = int(c.anchors[(site_i + 1) % n])

    A3, B3 = mesh.vertices[edge[0]], mesh.vertices[edge[1]]
    M = 0.5 * (A3 + B3)
    L = float(np.linalg.norm(B3 - A3))
    ehat = (B3 - A3) / L
    pl_e = float(np.linalg.norm(ehat[:2]))
    if pl_e < 1e-9:
        return None                # edge projects to a point
    u2 = ehat[:2] / pl_e
    n2 = np.array([-u2[1], u2[0]])

    # at a fold edge both faces project to one side of the projected
    # edge line; orient the frame toward that side
    apex_from = mesh.vertices[[v for v in mesh.faces[f_from] if v not in edge][0]]
    if float(np.dot(apex_from[:2] - M[:2], n2)) < 0:
        ehat, u2, n2 = -ehat, -u2, -n2

    geo = {}
    for f, sign in ((f_from, -1), (f_to, +1)):
        apex = mesh.vertices[[v for v in mesh.faces[f] if v not in edge][0]]
        a_off = float(np.dot(apex - M, ehat))
        H = (apex - M) - a_off * ehat
        dproj = float(np.dot(H[:2], n2))
        if dproj <= 0:
            return None            # faces must overlap on the n2 side
        shear = float(np.dot(H[:2], u2))
        geo[sign] = (H, a_off, dproj, shear)
    dmin = min(geo[-1][2], geo[+1][2])

    # rotate the curve so the splice region cannot wrap the seam
    shift = (site_i - n // 2) % n
    samples, anchors, marks = _rotated_curve_data(c, shift)
    i = (site_i - shift) % n

    def eta(k):
        # projected distance of a sample from the fold edge line
        return float(np.dot(samples[k][:2] - M[:2], n2))

    # junctions: walk outward over removable samples (anchored on the
    # two fold faces), keeping the deepest point reached per side, then
    # shrink the kink (same aspect) until the junctions clear it
    j0, best_lo = i, eta(i)
    r = 0
    while r < KINK_MAX_REMOVED and i - r > 0 and int(anchors[i - r]) in (f_from, f_to):
        r += 1
        if eta(i - r) > best_lo:
            j0, best_lo = i - r, eta(i - r)
    j1, best_hi = i + 1, eta(i + 1)
    r = 0
    while r < KINK_MAX_REMOVED and i + 1 + r < n - 1 and int(anchors[i + 1 + r]) in (f_from, f_to):
        r += 1
        if eta(i + 1 + r) > best_hi:
            j1, best_hi = i + 1 + r, eta(i + 1 + r)
    if any(j0 < m < j1 for m in marks):
        return None                # never consume a cusp

    depth = depth_frac * dmin      # projected kink depth
    fit = min(best_lo, best_hi) / (KINK_DEPTH_CLEAR * (1.0 + 1e-9))
    if fit < depth:
        if fit < 1e-5 * dmin:
            return None            # junctions too shallow for floats
        depth = fit
    width = depth                  # isotropic, so pattern angles are physical

    # kink center along the projected edge: between the junctions
    xi0 = float(np.dot(samples[j0][:2] - M[:2], u2))
    xi1 = float(np.dot(samples[j1][:2] - M[:2], u2))
    cxi = float(np.clip(0.5 * (xi0 + xi1), -0.25 * L * pl_e, 0.25 * L * pl_e))

    sgn = -1.0 if mirror else 1.0
    pts, anc = [], []
    for zeta, y in KINK_PATTERN:
        side = 1 if zeta > 0 else -1 if zeta < 0 else 1
        H, a_off, dproj, shear = geo[side]
        s = abs(zeta) * depth / dproj           # fraction along the face height
        xi = cxi + sgn * y * width
        y3 = (xi - s * shear) / pl_e            # shear-cancelled edge coordinate
        # the face at height fraction s spans a shrinking edge-parallel window
        half = (1.0 - s) * 0.5 * L * 0.92
        if abs(y3 - s * a_off) > half:
            return None
        pts.append(M + y3 * ehat + s * H)
        anc.append(f_to if side > 0 else f_from)

    new_samples = np.vstack([samples[: j0 + 1], np.array(pts), samples[j1:]])
    new_anchors = np.concatenate([anchors[: j0 + 1], np.array(anc, dtype=anchors.dtype), anchors[j1:]])
    delta = len(pts) - (j1 - j0 - 1)
    new_marks = [m if m <= j0 else m + delta for m in marks]

    # reject sharp projected turns, which the framing would read as cusps
    m2 = len(new_samples)
    for k in range(j0 - 1, j0 + len(pts) + 2):
        a = new_samples[(k - 1) % m2][:2]
        b = new_samples[k % m2][:2]
        d = new_samples[(k + 1) % m2][:2]
        v1, v2 = b - a, d - b
        nv = np.linalg.norm(v1) * np.linalg.norm(v2)
        if nv > 0 and float(np.dot(v1, v2)) / nv < KINK_TURN_COS:
            return None
    return new_samples, new_anchors, new_marks


def _insert_kink(c, step, lam, w_old, seed):
    """One verified writhe step: returns (new curve, new writhe) with
    writhe changed by exactly `step` and surface linking unchanged."""
    sites = _fold_sites(c)
    for depth_frac in KINK_SCALES:
        for site_i, edge in sites:
            for mirror in (False, True):
                cand = _kink_candidate(c, site_i, edge, depth_frac, mirror)
                if cand is None:
                    continue
                try:
                    curve = build_curve(cand[0], cusp_marks=cand[2])
                    cos = CurveOnSurface(curve, cand[1], c.mesh)
                    w_new = writhe_definitional(curve, seed=seed)
                    if w_new - w_old != step:
                        continue
                    if surface_linking(cos, seed=seed) != lam:
                        continue
                except ProfileKitError:
                    continue
                return cos, w_new
    raise NoRoomForKink(
        f"no fold crossing admits a verified kink ({len(sites)} sites tried); "
        "refine the mesh or resample the curve")


def ri_correct(c: CurveOnSurface, seed: int = 0) -> CurveOnSurface:
    """Close the writhe deficit by |deficit| verified kinks.

    Returns the input unchanged when writhe already equals surface
    linking number.  Each kink is inserted where the curve crosses a
    fold edge, stays on the two fold faces (an isotopy of the curve
    within the surface), and is kept only if it changes the writhe by
    exactly sign(deficit) while leaving the surface linking number
    unchanged.
    """
    marks, chirs = _cusp_data(c.curve)
    if len(marks) % 2 == 1 or len(set(chirs)) > 1:
        raise ProfileKitError(
            "cusp parity or chirality violation cannot be repaired by kinks")
    lam = surface_linking(c, seed=seed)
    w = writhe_definitional(c.curve, seed=seed)
    step = 1 if lam > w else -1
    while w != lam:
        c, w = _insert_kink(c, step, lam, w, seed)
    return c

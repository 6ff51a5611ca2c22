"""Realizability decision, kink correction, cusp laws, exclusions."""
import numpy as np
import pytest

from profilekit.diagram import CuspPoint, PlanarDiagram, project
from profilekit.errors import DegenerateProjection, InsufficientFacts, ProfileKitError
from profilekit.generators import preset, torus_with_curve
from profilekit.geom import CurveOnSurface, build_curve, build_mesh, perturb
from profilekit.obstruction import (
    DiagramFacts,
    check_contour,
    check_realizable,
    exclude_surfaces,
    ri_correct,
)


def generic_diagram(curve, seed=17):
    """Crossing data of a nearby generic projection (same invariants)."""
    mag = 1e-7
    for k in range(40):
        try:
            return project(perturb(curve, seed + k, mag))
        except DegenerateProjection:
            mag *= 2
    raise RuntimeError("no generic projection found")


def octahedron_mesh():
    v = np.array([[1.0, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]])
    f = np.array([[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
                  [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]])
    return build_mesh(v, f)


def marked_quad_on_face(marks):
    """Nonconvex quad inside one octahedron face; mark indices 1 and 2
    turn opposite ways, so chirality mixes iff both are marked."""
    mesh = octahedron_mesh()
    A, B, C = mesh.vertices[mesh.faces[0]]
    bary = lambda u, v, w: u * A + v * B + w * C
    quad = np.array([
        bary(0.60, 0.20, 0.20),
        bary(0.20, 0.60, 0.20),
        bary(0.30, 0.35, 0.35),
        bary(0.20, 0.20, 0.60),
    ])
    curve = build_curve(quad, cusp_marks=marks)
    return CurveOnSurface(curve, np.zeros(4, dtype=np.int64), mesh)


# ------------------------------------------------------------ realizability

def test_profile_curves_are_realizable(profiles):
    for p in profiles[1]:
        rep = check_realizable(p, seed=5)
        assert rep.realizable
        assert rep.deficit == 0
        assert rep.writhe == rep.surface_linking


def test_torus_one_one_not_realizable(torus_11):
    rep = check_realizable(torus_11, seed=5)
    assert (rep.writhe, rep.surface_linking) == (0, 1)
    assert not rep.realizable
    assert rep.deficit == 1
    doc = rep.to_json()
    assert set(doc) == {"writhe", "surface_linking", "realizable", "deficit",
                        "cusp_summary", "exclusions"}


def test_mixed_chirality_blocks_realizability():
    cos = marked_quad_on_face((1, 2))
    rep = check_realizable(cos, seed=1)
    assert not rep.realizable
    assert not rep.cusp_summary["uniform"]
    assert "note" in rep.cusp_summary


def test_odd_cusp_count_blocks_realizability():
    cos = marked_quad_on_face((1,))
    rep = check_realizable(cos, seed=1)
    assert not rep.realizable
    assert not rep.cusp_summary["even"]


# -------------------------------------------------------------- ri_correct

def test_ri_correct_identity_on_zero_deficit():
    cos = torus_with_curve(1, 0)
    assert ri_correct(cos, seed=5) is cos


@pytest.mark.parametrize("q", [1, -1, 2, -2, 3, -3])
def test_ri_correct_closes_deficit(q):
    cos = torus_with_curve(1, q)
    before = check_realizable(cos, seed=5)
    assert before.deficit == q and not before.realizable
    fixed = ri_correct(cos, seed=5)
    after = check_realizable(fixed, seed=5)
    assert after.realizable
    assert after.writhe == after.surface_linking == q
    assert ri_correct(fixed, seed=5) is fixed
    # the input was not modified
    assert len(cos.curve) < len(fixed.curve)


def test_ri_correct_adds_one_crossing_per_unit_deficit():
    cos = torus_with_curve(2, 3)
    fixed = ri_correct(cos, seed=5)
    n0 = len(generic_diagram(cos.curve).crossings)
    n1 = len(generic_diagram(fixed.curve).crossings)
    assert (n0, n1) == (3, 6)


def test_ri_correct_rejects_cusp_violations():
    with pytest.raises(ProfileKitError):
        ri_correct(marked_quad_on_face((1, 2)), seed=1)


# ------------------------------------------------------------ contour laws

def _diagram_with_cusps(chirs):
    strand = np.array([[0.0, 0, 0], [1.0, 0, 0], [1.0, 1, 0], [0.0, 1, 0]])
    cusps = tuple(CuspPoint(strand=0, vertex=i, chirality=c) for i, c in enumerate(chirs))
    return PlanarDiagram([strand], crossings=(), cusps=cusps)


def test_contour_even_uniform_passes():
    v = check_contour(_diagram_with_cusps(["left", "left"]))
    assert v.passed and v.failures == ()
    assert v.to_json()["verdict"] == "PASS"


def test_contour_odd_count_fails():
    v = check_contour(_diagram_with_cusps(["left"]))
    assert not v.passed
    assert any("odd" in f for f in v.failures)


def test_contour_mixed_chirality_fails():
    v = check_contour(_diagram_with_cusps(["left", "right"]))
    assert not v.passed
    assert any("chirality" in f for f in v.failures)


def test_contour_one_sided_flips_parity():
    assert check_contour(_diagram_with_cusps(["left"]), orientable_neighborhood=False).passed
    assert not check_contour(_diagram_with_cusps(["left", "left"]),
                             orientable_neighborhood=False).passed


def test_contour_requires_single_strand():
    d = _diagram_with_cusps(["left", "left"])
    two = PlanarDiagram([d.strands[0], d.strands[0] + 5.0], (), d.cusps)
    with pytest.raises(ValueError):
        check_contour(two)


def test_contour_preset_mixed_fails():
    v = check_contour(preset("mixed_chirality_contour"))
    assert not v.passed
    assert sorted(v.chiralities) == ["left", "right"]


# -------------------------------------------------------------- exclusions

def classes(w, **kw):
    return sorted(e.surface_class for e in exclude_surfaces(w, DiagramFacts(**kw)))


def test_exclude_nothing_for_zero_writhe():
    assert classes(0) == []


def test_exclude_sphere_for_nonzero_writhe():
    assert classes(2) == ["sphere"]
    assert classes(-5) == ["sphere"]


def test_exclude_knotted_torus_for_unit_writhe_unknot():
    assert classes(1, knot_type="unknot") == ["knotted torus", "sphere"]
    assert classes(-1, knot_type="unknot") == ["knotted torus", "sphere"]
    assert classes(2, knot_type="unknot") == ["sphere"]


def test_exclude_unknotted_torus_for_cheap_trefoil():
    assert classes(-3, knot_type="trefoil", crossings=3, cusps=0) == [
        "sphere", "unknotted torus"]
    assert classes(-3, knot_type="trefoil", crossings=4, cusps=2) == ["sphere"]


def test_exclude_trefoil_needs_counts():
    with pytest.raises(InsufficientFacts):
        exclude_surfaces(-3, DiagramFacts(knot_type="trefoil"))


def test_exclude_sign_unknown_reason():
    (e,) = exclude_surfaces(-4, DiagramFacts(sign_unknown=True))
    assert "|writhe| = 4" in e.reason

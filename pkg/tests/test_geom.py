"""Geometric kernel: validation, rigid motions, seeded perturbation."""
import numpy as np
import pytest

from profilekit.errors import (
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
from profilekit.geom import (
    CurveOnSurface,
    build_curve,
    build_mesh,
    min_feature_size,
    mirrored,
    perturb,
    perturb_jointly,
    rotated,
    rotation_matrix,
    segment_distances,
)


def circle(n=48, radius=1.0, z=0.0, center=(0.0, 0.0)):
    t = 2 * np.pi * (np.arange(n) + 0.5) / n
    return np.stack([center[0] + radius * np.cos(t),
                     center[1] + radius * np.sin(t),
                     np.full(n, z)], axis=1)


def octahedron():
    v = np.array([[1.0, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]])
    f = np.array([[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
                  [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]])
    return v, f


# --------------------------------------------------------------------- curves

def test_build_curve_valid_circle():
    c = build_curve(circle())
    assert len(c) == 48
    assert c.cusp_marks == ()
    with pytest.raises(ValueError):
        c.samples[0, 0] = 99.0   # arrays are frozen


def test_curve_too_few_samples():
    with pytest.raises(DegenerateSegment):
        build_curve(np.array([[0.0, 0, 0], [1, 0, 0]]))


def test_curve_duplicate_sample():
    pts = circle()
    pts[5] = pts[4]
    with pytest.raises(DegenerateSegment):
        build_curve(pts)


def test_curve_self_intersection():
    # bowtie: the two diagonals of a square cross
    pts = np.array([[0.0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(NotEmbedded):
        build_curve(pts)


def test_curve_unmarked_reversal():
    pts = np.array([[0.0, 0, 0], [2, 0, 0], [1, 0, 0], [1, 1, 0]])
    with pytest.raises(UnmarkedReversal):
        build_curve(pts)


def test_curve_cusp_mark_out_of_range():
    with pytest.raises(ValueError):
        build_curve(circle(), cusp_marks=(99,))


# --------------------------------------------------------------------- meshes

def test_build_mesh_octahedron():
    v, f = octahedron()
    mesh = build_mesh(v, f)
    assert mesh.euler_characteristic == 2
    assert np.allclose(np.linalg.norm(mesh.face_normals, axis=1), 1.0)
    assert len(mesh.edges) == 12
    fr = mesh.edge_faces
    assert fr.shape == (12, 2)


def test_mesh_flipped_face():
    v, f = octahedron()
    f = f.copy()
    f[0] = f[0][::-1]
    with pytest.raises(InconsistentOrientation):
        build_mesh(v, f)


def test_mesh_open_surface():
    v, f = octahedron()
    with pytest.raises(NonManifold):
        build_mesh(v, f[:-1])


def test_mesh_degenerate_face():
    v, f = octahedron()
    f = f.copy()
    f[0] = [0, 0, 2]
    with pytest.raises(DegenerateFace):
        build_mesh(v, f)


def test_mesh_face_index_out_of_range():
    v, f = octahedron()
    f = f.copy()
    f[0, 0] = 17
    with pytest.raises(DegenerateFace):
        build_mesh(v, f)


def test_mesh_interpenetrating_components():
    v, f = octahedron()
    v2 = np.vstack([v, v + [0.5, 0.0, 0.0]])
    f2 = np.vstack([f, f + 6])
    with pytest.raises(SelfIntersecting):
        build_mesh(v2, f2)


# ------------------------------------------------------------- rigid motions

def test_rotation_matrix_is_orthogonal():
    R = rotation_matrix((0.0, 1.0, 0.0), np.pi / 2)
    assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
    assert np.isclose(np.linalg.det(R), 1.0)
    assert np.allclose(R @ [0, 0, 1.0], [1.0, 0, 0], atol=1e-12)


def test_rotated_preserves_lengths():
    c = build_curve(circle())
    r = rotated(c, (1.0, 2.0, 0.5), 0.7)
    lens = np.linalg.norm(c.segment_vectors(), axis=1)
    lens_r = np.linalg.norm(r.segment_vectors(), axis=1)
    assert np.allclose(lens, lens_r, atol=1e-12)

    v, f = octahedron()
    mesh = build_mesh(v, f)
    mr = rotated(mesh, (0.0, 0.0, 1.0), 0.3)
    assert np.allclose(mesh.face_areas, mr.face_areas, atol=1e-12)
    assert np.array_equal(mesh.faces, mr.faces)


def test_mirrored_negates_y():
    c = build_curve(circle(center=(0.5, 0.25)))
    m = mirrored(c)
    assert np.allclose(m.samples[:, 1], -c.samples[:, 1])
    assert np.allclose(m.samples[:, [0, 2]], c.samples[:, [0, 2]])


# ----------------------------------------------------------------- perturb

def test_perturb_is_rigid_and_seeded():
    c = build_curve(circle())
    p1 = perturb(c, seed=7, magnitude=1e-3)
    p2 = perturb(c, seed=7, magnitude=1e-3)
    p3 = perturb(c, seed=8, magnitude=1e-3)
    assert np.array_equal(p1.samples, p2.samples)
    assert not np.array_equal(p1.samples, p3.samples)
    d0 = np.linalg.norm(c.samples[0] - c.samples[20])
    d1 = np.linalg.norm(p1.samples[0] - p1.samples[20])
    assert np.isclose(d0, d1, atol=1e-12)


def test_perturb_zero_magnitude_returns_input():
    c = build_curve(circle())
    assert perturb(c, seed=1, magnitude=0.0) is c


def test_perturb_too_large():
    c = build_curve(circle())
    with pytest.raises(PerturbationTooLarge):
        perturb(c, seed=1, magnitude=0.2)


def test_perturb_jointly_preserves_relative_position():
    a = build_curve(circle())
    b = build_curve(circle(z=2.0, center=(0.4, 0.0)))
    ra, rb = perturb_jointly([a, b], seed=3, magnitude=1e-2)
    gap0 = np.linalg.norm(a.samples[0] - b.samples[10])
    gap1 = np.linalg.norm(ra.samples[0] - rb.samples[10])
    assert np.isclose(gap0, gap1, atol=1e-12)


# ---------------------------------------------------------- curve on surface

def _face_point(mesh, fi, w):
    a, b, c = mesh.vertices[mesh.faces[fi]]
    return w[0] * a + w[1] * b + w[2] * c


def test_curve_on_surface_valid():
    v, f = octahedron()
    mesh = build_mesh(v, f)
    pts = np.array([_face_point(mesh, 0, w) for w in
                    [(0.6, 0.2, 0.2), (0.2, 0.6, 0.2), (0.15, 0.35, 0.5), (0.45, 0.15, 0.4)]])
    cos = CurveOnSurface(build_curve(pts), np.zeros(4, dtype=np.int64), mesh)
    assert len(cos.anchors) == 4


def test_curve_on_surface_wrong_anchor_count():
    v, f = octahedron()
    mesh = build_mesh(v, f)
    pts = np.array([_face_point(mesh, 0, w) for w in
                    [(0.6, 0.2, 0.2), (0.2, 0.6, 0.2), (0.2, 0.2, 0.6)]])
    with pytest.raises(AnchorMismatch):
        CurveOnSurface(build_curve(pts), np.zeros(5, dtype=np.int64), mesh)


def test_curve_on_surface_sample_off_face():
    v, f = octahedron()
    mesh = build_mesh(v, f)
    pts = np.array([_face_point(mesh, 0, w) for w in
                    [(0.6, 0.2, 0.2), (0.2, 0.6, 0.2), (0.2, 0.2, 0.6)]])
    pts[1] += [0.0, 0.0, 0.5]
    with pytest.raises(AnchorMismatch):
        CurveOnSurface(build_curve(pts), np.zeros(3, dtype=np.int64), mesh)


def test_curve_on_surface_nonadjacent_anchors():
    v, f = octahedron()
    mesh = build_mesh(v, f)
    # faces 0 and 6 share no vertex; zigzag between their interiors
    pts = np.array([
        _face_point(mesh, 0, (0.5, 0.3, 0.2)),
        _face_point(mesh, 6, (0.5, 0.3, 0.2)),
        _face_point(mesh, 0, (0.2, 0.3, 0.5)),
        _face_point(mesh, 6, (0.2, 0.3, 0.5)),
    ])
    with pytest.raises(AnchorMismatch):
        CurveOnSurface(build_curve(pts), np.array([0, 6, 0, 6]), mesh)


# ------------------------------------------------------------------ metrics

def test_min_feature_size_of_curve():
    c = build_curve(circle())
    seg = np.linalg.norm(c.segment_vectors(), axis=1).min()
    assert 0 < min_feature_size(c) <= seg


def test_min_feature_size_of_mesh():
    # opposite faces of the octahedron are the closest disjoint features:
    # planes x+y+z = +-1 are 2/sqrt(3) apart, less than the edge length sqrt(2)
    v, f = octahedron()
    mesh = build_mesh(v, f)
    assert np.isclose(mesh.min_feature_size(), 2.0 / np.sqrt(3.0))


def test_segment_distances_values():
    d = segment_distances([0.0, 0, 0], [1.0, 0, 0], [0.0, 0, 1], [1.0, 0, 1])
    assert np.isclose(float(d), 1.0)
    d = segment_distances([0.0, 0, 0], [1.0, 1, 0], [1.0, 0, 0], [0.0, 1, 0])
    assert np.isclose(float(d), 0.0, atol=1e-12)
    d = segment_distances([0.0, 0, 0], [1.0, 0, 0], [2.0, 1, 0], [3.0, 1, 0])
    assert np.isclose(float(d), np.sqrt(2.0))

"""Blackboard and surface framings, push-offs, framed invariants."""
import numpy as np
import pytest

from profilekit.diagram import writhe
from profilekit.errors import ProfileKitError, PushOffCollision, VerticalTangent
from profilekit.framing import (
    BLACKBOARD,
    FramedCurve,
    blackboard_framing,
    push_off,
    surface_framing,
    surface_linking,
    writhe_definitional,
)
from profilekit.generators import preset
from profilekit.geom import build_curve, rotated


def tilted_circle(n=48, tilt=np.pi / 6):
    t = 2 * np.pi * (np.arange(n) + 0.5) / n
    flat = build_curve(np.stack([np.cos(t), np.sin(t), np.zeros(n)], axis=1))
    return rotated(flat, (1.0, 0.0, 0.0), tilt)


def test_blackboard_normals_horizontal_and_orthogonal():
    c = tilted_circle()
    f = blackboard_framing(c)
    assert f.kind == BLACKBOARD
    assert np.abs(f.normals[:, 2]).max() == 0.0
    assert np.allclose(np.linalg.norm(f.normals, axis=1), 1.0, atol=1e-12)
    T = np.roll(c.samples, -1, axis=0) - np.roll(c.samples, 1, axis=0)
    orth = np.abs((f.normals * T).sum(axis=1)) / np.linalg.norm(T, axis=1)
    assert orth.max() < 1e-12


def test_blackboard_rejects_vertical_tangent():
    t = 2 * np.pi * (np.arange(48) + 0.5) / 48
    vertical = build_curve(np.stack([np.cos(t), np.zeros(48), np.sin(t)], axis=1))
    with pytest.raises(VerticalTangent):
        blackboard_framing(vertical)


def test_blackboard_rejects_odd_cusp_count():
    c = tilted_circle()
    marked = build_curve(c.samples, cusp_marks=(3,))
    with pytest.raises(ProfileKitError):
        blackboard_framing(marked)


def test_blackboard_flips_side_at_cusps():
    c = preset("model_cusp")
    f = blackboard_framing(c)
    assert np.abs(f.normals[:, 2]).max() == 0.0
    assert np.allclose(np.linalg.norm(f.normals, axis=1), 1.0, atol=1e-12)
    for m in c.cusp_marks:
        assert np.array_equal(f.normals[m], f.normals[m - 1])


def test_push_off_epsilon_bounds():
    c = tilted_circle()
    f = blackboard_framing(c)
    with pytest.raises(ValueError):
        push_off(f, 0.0)
    with pytest.raises(ValueError):
        push_off(f, c.min_feature_size())


def test_push_off_disjoint_copy():
    c = tilted_circle()
    f = blackboard_framing(c)
    eps = 0.25 * c.min_feature_size()
    pushed = push_off(f, eps)
    assert len(pushed) == len(c)
    gaps = np.linalg.norm(pushed.samples - c.samples, axis=1)
    assert np.allclose(gaps, eps, atol=1e-12)


def test_push_off_collision_at_tight_corner():
    # wedge with inward-pointing normals: the pushed legs collide
    leg = np.linspace(1.0, 0.05, 8)
    a = 0.18
    upper = np.stack([leg, a * leg, np.zeros(8)], axis=1)
    lower = np.stack([leg[::-1], -a * leg[::-1], np.zeros(8)], axis=1)
    back = np.array([[1.15, -0.5, 0.3], [1.3, 0.0, 0.4], [1.15, 0.5, 0.3]])
    c = build_curve(np.concatenate([upper, [[0.0, 0.0, 0.0]], lower, back]))
    normals = np.zeros((len(c), 3))
    normals[:8] = [0, -1, 0]
    normals[8] = [-1, 0, 0]
    normals[9:17] = [0, 1, 0]
    normals[17:] = [0, 0, 1.0]
    f = FramedCurve(c, normals, BLACKBOARD)
    with pytest.raises(PushOffCollision):
        push_off(f, 0.45 * c.min_feature_size())


def test_surface_framing_uses_anchor_normals(torus_11):
    f = surface_framing(torus_11)
    assert np.array_equal(f.normals, torus_11.mesh.face_normals[torus_11.anchors])


def test_surface_linking_value_and_explicit_epsilon(torus_11):
    assert surface_linking(torus_11, seed=11) == 1
    assert surface_linking(torus_11, seed=11, epsilon=1e-3) == 1


@pytest.mark.parametrize("name,expected", [("figeight_w1", 1), ("trefoil_standard", -3)])
def test_definitional_writhe_matches_crossing_sum(name, expected):
    c = preset(name)
    assert writhe_definitional(c, seed=2) == expected == writhe(c, seed=2)

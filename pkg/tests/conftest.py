"""Shared fixtures: the expensive meshes and extractions are built once
per session; tests must not mutate them (all arrays are frozen anyway).
"""
import numpy as np
import pytest

from profilekit.generators import preset, standard_surface, torus_with_curve, tube_around_knot
from profilekit.geom import rotated
from profilekit.profile import extract_profile


@pytest.fixture(scope="session")
def surfaces():
    return {g: standard_surface(g) for g in range(4)}


@pytest.fixture(scope="session")
def profiles(surfaces):
    return {g: extract_profile(surfaces[g]) for g in range(4)}


@pytest.fixture(scope="session")
def tilted_torus(surfaces):
    return rotated(surfaces[1], (1.0, 0.0, 0.0), np.pi / 3)


@pytest.fixture(scope="session")
def tilted_profiles(tilted_torus):
    return extract_profile(tilted_torus)


@pytest.fixture(scope="session")
def trefoil_tube():
    return tube_around_knot(preset("trefoil_standard"))


@pytest.fixture(scope="session")
def tube_profiles(trefoil_tube):
    return extract_profile(trefoil_tube)


@pytest.fixture(scope="session")
def torus_11():
    return torus_with_curve(1, 1)

"""
Shared meshes for the test suite
"""

import numpy as np
import pytest

from src.core.geometry import build_geometry
from src.core.operators import build_operators
from src.utils.meshes import circle_loop, icosphere, space_curve_loop, square_loop


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def circle():
    return circle_loop(256)


@pytest.fixture(scope="session")
def small_circle():
    return circle_loop(64)


@pytest.fixture(scope="session")
def sphere():
    return icosphere(3)


@pytest.fixture(scope="session")
def space_curve():
    return space_curve_loop(128)


@pytest.fixture(scope="session")
def square():
    return square_loop(2)


def assembled(mesh):
    """(cache, ops) at the reference positions"""
    cache = build_geometry(mesh)
    return cache, build_operators(cache, mesh)

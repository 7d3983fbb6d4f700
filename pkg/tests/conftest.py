import math
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from reuleaux.geometry import DiskPolygon, build_regular_reuleaux
from reuleaux.optimize import random_reuleaux

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

odd_n = st.sampled_from([5, 7, 9, 11])


@st.composite
def reuleaux_polygons(draw, ns=(5, 7, 9)):
    """Random Reuleaux polygon reached by feasible moves from a regular one."""
    n = draw(st.sampled_from(ns))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_reuleaux(n, seed)


@st.composite
def unit_vectors(draw):
    a = draw(st.floats(0.0, 2 * math.pi, allow_nan=False))
    return np.array([math.cos(a), math.sin(a)])


@st.composite
def disk_polygons(draw):
    """Disks centred on a small circle; each one contributes a boundary arc."""
    n = draw(st.integers(3, 9))
    rho = draw(st.floats(0.1, 0.45))
    gaps = np.array(draw(st.lists(st.floats(0.3, 1.0), min_size=n, max_size=n)))
    ang = np.cumsum(gaps / gaps.sum() * 2 * math.pi) + draw(st.floats(0.0, 2 * math.pi))
    centers = rho * np.column_stack([np.cos(ang), np.sin(ang)])
    return DiskPolygon.from_centers(centers)


def rigid_motion(x, angle, shift):
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return np.asarray(x) @ rot.T + np.asarray(shift)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def regular7():
    return build_regular_reuleaux(7)


@pytest.fixture
def random7():
    return random_reuleaux(7, 5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for res in sorted(results, key=lambda r: r.number):
        terminalreporter.write_line(res.line())

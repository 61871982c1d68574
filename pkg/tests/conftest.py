import numpy as np
import pytest

from acutemap import TrigBoundary, solve_correspondence

TWO_PI = 2.0 * np.pi


def semidisk_samples(count=256, grade=0.8, shift=-0.4j):
    """Uniform-parameter samples of a unit half-disk traced counterclockwise.

    Parameter is split between the arc and the diameter in proportion to
    their arclengths, and within each piece the speed is graded down near
    the junctions so that a moderate trigonometric fit resolves the two
    right-angle corners without overshooting into a self-intersection.
    The shift keeps 0 well inside; t = 0 lands at the top of the arc.
    """
    s1 = 2.0 * np.pi**2 / (np.pi + 2.0)
    t = TWO_PI * np.arange(count) / count
    ts = np.mod(t + 0.5 * s1, TWO_PI)
    z = np.empty(count, dtype=complex)
    arc = ts < s1
    u = ts[arc] / s1
    v = u - grade * np.sin(TWO_PI * u) / TWO_PI
    z[arc] = np.exp(1j * np.pi * v)
    u = (ts[~arc] - s1) / (TWO_PI - s1)
    v = u - grade * np.sin(TWO_PI * u) / TWO_PI
    z[~arc] = -1.0 + 2.0 * v
    return z + shift


@pytest.fixture(scope="session")
def circle():
    return TrigBoundary({1: 1.0})


@pytest.fixture(scope="session")
def lobed():
    """Smooth curve with a thin neck; hard case for interior evaluation."""
    return TrigBoundary({1: 1.0, -2: 0.25, -3: 0.125j})


@pytest.fixture(scope="session")
def semidisk_boundary():
    return TrigBoundary.fit(semidisk_samples(), 16, 16)


@pytest.fixture(scope="session")
def circle_raw(circle):
    return solve_correspondence(circle, 8, 256)


@pytest.fixture(scope="session")
def lobed_raw(lobed):
    return solve_correspondence(lobed, 64, 1024)


@pytest.fixture(scope="session")
def semidisk_raw(semidisk_boundary):
    return solve_correspondence(semidisk_boundary, 16, 512)

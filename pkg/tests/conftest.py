import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pulsefock.grid_modes import Grid, Mode

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SMALL = Grid(16, dx=0.5, origin=-2.0)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
coeffs = st.builds(complex, finite, finite)


@st.composite
def modes(draw, grid=SMALL, nonzero=True):
    re = draw(st.lists(finite, min_size=grid.n_points, max_size=grid.n_points))
    im = draw(st.lists(finite, min_size=grid.n_points, max_size=grid.n_points))
    samples = np.array(re) + 1j * np.array(im)
    if nonzero and np.linalg.norm(samples) < 1e-3:
        samples[0] += 1.0
    return Mode(grid, samples)


@st.composite
def unit_modes(draw, grid=SMALL):
    m = draw(modes(grid))
    return m / m.norm()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

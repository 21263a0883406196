import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ringconv import IsoSystem, RingParams
from ringconv.io import bundled_system

settings.register_profile(
    "ringconv", deadline=None, max_examples=200,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("ringconv")

Z4 = RingParams(2, 2)
Z8 = RingParams(2, 3)
Z9 = RingParams(3, 2)


@pytest.fixture
def z4():
    return Z4


@pytest.fixture
def scalar_system():
    return IsoSystem([[1]], [[1]], [[1]], [[1]], Z4)


@pytest.fixture(params=["scalar_z4", "delta2_z4", "delta3_z4"])
def bundled(request):
    s, defaults = bundled_system(request.param)
    return request.param, s, defaults["T"], defaults["theta"]


def brute_image(m, q):
    """Set of all images ``m @ x`` over Z/q, by enumeration."""
    m = np.asarray(m)
    cols = m.shape[1]
    grid = np.indices((q,) * cols).reshape(cols, -1).T
    return {tuple(row) for row in (grid @ m.T) % q}

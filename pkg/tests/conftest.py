import math

import numpy as np
import pytest

from ddinfer.qubit_model import CanonicalChannel, d1_feasible_interval

SQRT_HALF = math.sqrt(0.5)
# tomographic and minimal-area channels of the reference experiment
C_T = CanonicalChannel(0.573, 0.603, 0.430, 0.508)
C_DD = CanonicalChannel(0.5, 0.606, 0.437, 0.481)


def random_cp_channel(rng, interior=False):
    """Rejection-sample (d2, d3, c3) with a CP completion, then d1 inside its interval."""
    while True:
        d2, d3, c3 = rng.uniform(0, 1, 3)
        iv = d1_feasible_interval(d2, d3, c3)
        if iv is None:
            continue
        lo, hi = iv
        d1 = rng.uniform(lo, hi) if interior else hi
        return CanonicalChannel(d1, d2, d3, c3)


def random_orthogonal(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

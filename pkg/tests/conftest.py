import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from goldstein.objectives import MaxAffine, builtin  # noqa: E402


def random_max_affine(seed=7, pieces=6, dim=3):
    """Bounded-below max-affine function: slopes centred so 0 lies in their hull."""
    rng = np.random.default_rng(seed)
    slopes = rng.uniform(-1, 1, (pieces, dim))
    slopes -= slopes.mean(axis=0)
    return MaxAffine(slopes, rng.uniform(-0.3, 0.3, pieces))


def max_affine_instances():
    return [
        MaxAffine([[1.0], [-1.0]]),
        MaxAffine([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]),
        random_max_affine(),
    ]


def radial_objectives(dims=(1, 2, 5), alpha=1.0):
    return [builtin(name, alpha, d) for name in ("half_sq_norm", "scaled_norm", "quartic")
            for d in dims]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

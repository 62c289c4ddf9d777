import numpy as np
import pytest

from mhdsem import physics as ph


def random_admissible_prim(rng, n=1, pmin=0.05, rhomin=0.1):
    """Random admissible primitive states (n, 8)."""
    q = np.empty((n, 8))
    q[:, 0] = rhomin + rng.random(n) * 2.0
    q[:, 1:4] = rng.standard_normal((n, 3))
    q[:, 4:7] = rng.standard_normal((n, 3))
    q[:, 7] = pmin + rng.random(n) * 2.0
    return q


def random_admissible_cons(rng, g, n=1, **kw):
    return ph.prim_to_cons(random_admissible_prim(rng, n, **kw), g)


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)


@pytest.fixture
def gas():
    return ph.GasModel(5.0 / 3.0)

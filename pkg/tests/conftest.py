import numpy as np
import pytest

from aoakit.arrays import Array, cyclic_oa, trivial_construct


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


@pytest.fixture
def oa_4_3_2():
    """The 4-run, 3-factor, 2-level orthogonal array of strength 2."""
    return cyclic_oa(2)


@pytest.fixture
def t0(oa_4_3_2):
    """Smallest doubled-column example: first column repeated once."""
    return trivial_construct(oa_4_3_2)


def random_array(rng, n_runs=None, n_factors=None, n_levels=None) -> Array:
    s = int(n_levels if n_levels is not None else rng.integers(2, 6))
    n = int(n_runs if n_runs is not None else rng.integers(2, 21))
    k = int(n_factors if n_factors is not None else rng.integers(2, 9))
    cells = rng.integers(1, s + 1, size=(n, k))
    return Array(cells, s)

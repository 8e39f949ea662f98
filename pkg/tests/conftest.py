import numpy as np
import pytest

from purelab.spectra import sort_descending


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def sorted_simplex(d, rng):
    return sort_descending(rng.dirichlet(np.ones(d)))

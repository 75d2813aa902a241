import numpy as np
import pytest

from heatft.dynamics import TimeGrid
from heatft.report import RunConfig
from heatft.states import preset


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def correlated_params():
    return preset("correlated")


@pytest.fixture
def uncorrelated_params():
    return preset("uncorrelated")


@pytest.fixture
def correlated_config():
    return RunConfig.from_preset("correlated")


@pytest.fixture
def uncorrelated_config():
    return RunConfig.from_preset("uncorrelated")


@pytest.fixture
def short_grid():
    return TimeGrid.explicit([0.0, 0.77e-3, 1.77e-3, 2.32e-3])


def random_hermitian(rng, n=4, scale=1.0):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (m + m.conj().T) / 2.0


def random_density_matrix(rng, n=4):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real

import pytest

from divopt import ModelParams, solve_roots


@pytest.fixture(scope="session")
def pos_params():
    """Profitable-business reference point (hybrid regime)."""
    return ModelParams(mu=1.0, sigma=0.3, chi=0.01, beta=0.9, gamma=1.0, delta=0.15)


@pytest.fixture(scope="session")
def pos_roots(pos_params):
    return solve_roots(pos_params)


@pytest.fixture(scope="session")
def neg_params():
    """Unprofitable-business reference point (finite liquidation window)."""
    return ModelParams(mu=-1.0, sigma=0.3, chi=0.15, beta=0.7, gamma=1.0, delta=0.15)


@pytest.fixture(scope="session")
def neg_roots(neg_params):
    return solve_roots(neg_params)

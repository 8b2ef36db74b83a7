import pytest

from mobnb.oracle import OracleConfig, true_front
from mobnb.problems import get_problem


@pytest.fixture(scope="session")
def oracle_cache(tmp_path_factory):
    return tmp_path_factory.mktemp("oracle-cache")


@pytest.fixture(scope="session")
def gear_true_front(oracle_cache):
    """Exact gear front from the full 49^4 enumeration (pure integer)."""
    cfg = OracleConfig(max_enumeration=6_000_000)
    return true_front(get_problem("gear"), cfg, cache_dir=oracle_cache)


@pytest.fixture(scope="session")
def mela_true_front(oracle_cache):
    """Mela reference front: 2^8 combinations x 401^2 grid, refined and
    uniformly resampled at 1e-4."""
    cfg = OracleConfig(continuous_grid_points=401, max_enumeration=45_000_000)
    return true_front(get_problem("mela"), cfg, cache_dir=oracle_cache)

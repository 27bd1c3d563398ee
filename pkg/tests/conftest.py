import pytest

from cqrate.idelta import OptimizerOptions
from cqrate.reference import source_a, source_b, source_c


@pytest.fixture(scope="session")
def src_a():
    return source_a()


@pytest.fixture(scope="session")
def src_b():
    return source_b()


@pytest.fixture(scope="session")
def src_c():
    return source_c()


@pytest.fixture(scope="session")
def light_opts():
    # small but reliable budget for unit tests; acceptance uses its own
    return OptimizerOptions(seed=0, restarts=6, iters_per_stage=40)

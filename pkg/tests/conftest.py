import pytest

from cospectral.census import run_census


@pytest.fixture(scope="session")
def census8():
    return run_census(8, jobs=1)

import pytest

from phasewin.objectives import make_coverage, make_modular, make_surrogate


@pytest.fixture
def modular10():
    return make_modular([float(i) for i in range(1, 11)])


@pytest.fixture
def coverage8():
    return make_coverage(1, 8, universe=24)


@pytest.fixture(scope="session")
def surrogate50():
    return make_surrogate(3, 50)

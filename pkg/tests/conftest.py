import pytest

from shrinkshoot import solve_angenent, solve_cheng_wei, solve_mcgrath, solve_sphere


@pytest.fixture(scope="session")
def angenent2():
    return solve_angenent(2)


@pytest.fixture(scope="session")
def mcgrath2():
    return solve_mcgrath(2)


@pytest.fixture(scope="session")
def chengwei2():
    return solve_cheng_wei(2)


@pytest.fixture(scope="session")
def sphere2():
    return solve_sphere(2)

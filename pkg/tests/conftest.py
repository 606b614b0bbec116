import pytest

from treecochain.fq import Fq


@pytest.fixture(scope="session")
def F2():
    return Fq(2)


@pytest.fixture(scope="session")
def F3():
    return Fq(3)


@pytest.fixture(scope="session")
def F4():
    return Fq(2, 2, (1, 1, 1))


@pytest.fixture(scope="session")
def F5():
    return Fq(5)


@pytest.fixture(scope="session")
def F9():
    return Fq(3, 2, (1, 0, 1))

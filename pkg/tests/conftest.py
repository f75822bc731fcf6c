import pytest

from listpac.hclass import HypothesisClass, generate_example1, generate_grid, random_class
from listpac.rng import make_rng


def seeded_classes(count, max_m=6, max_p=6, max_rows=60, seed=0, min_p=1):
    """Deterministic stream of small random classes."""
    rng = make_rng(seed)
    classes = []
    for index in range(count):
        m = int(rng.integers(1, max_m + 1))
        p = int(rng.integers(min_p, max_p + 1))
        size = int(rng.integers(1, max_rows + 1))
        classes.append(random_class(m, p, size, seed * 7919 + index))
    return classes


@pytest.fixture
def square():
    return generate_grid(2, 2)


@pytest.fixture
def grid3x3():
    return generate_grid(2, 3)


@pytest.fixture
def singleton():
    return HypothesisClass(3, 2, ((1, 2, 1),))


@pytest.fixture(scope="session")
def example1_6_2():
    return generate_example1(6, 2)


@pytest.fixture
def random_classes():
    return seeded_classes

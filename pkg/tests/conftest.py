import pytest

from deabench.dataset import Dataset
from deabench.frontier import classify


def make_t1() -> Dataset:
    """One input, one output: A, B, C on the VRS frontier, D inside."""
    return Dataset.from_arrays("ABCD", [2, 4, 6, 5], [2, 5, 6, 3], rts="vrs")


def make_t2() -> Dataset:
    """Two inputs, one output under CRS; C lies between A and B."""
    return Dataset.from_arrays("ABCD", [[1, 3], [3, 1], [2, 2], [3, 3]], [1, 1, 1, 1], rts="crs")


@pytest.fixture
def t1():
    return make_t1()


@pytest.fixture
def t2():
    return make_t2()


@pytest.fixture
def t1_E(t1):
    return classify(t1).E


@pytest.fixture
def t2_E(t2):
    return classify(t2).E

import io

import pytest

from intern.catalog import build_example, make_sphere
from intern.cone import ConeSpace
from intern.reduction import reduce
from intern.utils import Logger


@pytest.fixture(scope="session")
def example2():
    return build_example("example2")


@pytest.fixture(scope="session")
def sasaki(example2):
    return example2.structure


@pytest.fixture(scope="session")
def sasaki_cone(sasaki):
    return ConeSpace(sasaki)


@pytest.fixture(scope="session")
def example1():
    return build_example("example1").structure


@pytest.fixture(scope="session")
def broken():
    return build_example("example2-broken").structure


@pytest.fixture(scope="session")
def sphere():
    return make_sphere(2)


@pytest.fixture(scope="session")
def reduced(example2):
    return reduce(example2.action, example2.slice)


@pytest.fixture
def quiet_logger():
    """Logger writing to a buffer; read it back with `logger.stream.getvalue()`."""
    return Logger(verbose=True, use_color=False, stream=io.StringIO())

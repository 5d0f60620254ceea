import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from graphforge import parse, validate

REPO = pathlib.Path(__file__).resolve().parent.parent
GRAPHS = REPO / "graphs"


@pytest.fixture(scope="session")
def mnist_softmax_source() -> str:
    return (GRAPHS / "mnist_softmax.graph").read_text()

@pytest.fixture(scope="session")
def mnist_softmax_spec(mnist_softmax_source):
    return parse(mnist_softmax_source)


@pytest.fixture(scope="session")
def mnist_softmax_graph(mnist_softmax_spec):
    return validate(mnist_softmax_spec)


@pytest.fixture(scope="session")
def mlp_source() -> str:
    return (GRAPHS / "mnist_mlp32.graph").read_text()


@pytest.fixture(scope="session")
def mlp_graph(mlp_source):
    return validate(parse(mlp_source))


@pytest.fixture(scope="session")
def blobs_softmax_graph():
    return validate(parse((GRAPHS / "blobs_softmax.graph").read_text()))

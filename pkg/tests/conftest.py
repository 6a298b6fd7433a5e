import pytest

from epiquant import HilbertRep, load_model


@pytest.fixture(scope="session")
def spin3_model():
    return load_model("spin3")


@pytest.fixture(scope="session")
def triangle6_model():
    return load_model("triangle6")


@pytest.fixture(scope="session")
def spin3_rep(spin3_model):
    return HilbertRep(spin3_model)


@pytest.fixture(scope="session")
def triangle6_rep(triangle6_model):
    return HilbertRep(triangle6_model)

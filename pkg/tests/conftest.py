import pytest

from nclb.models import load_model


@pytest.fixture(scope="session")
def h3():
    return load_model("heisenberg")


@pytest.fixture(scope="session")
def g47():
    return load_model("g4_7")

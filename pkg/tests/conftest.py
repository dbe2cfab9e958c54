import pytest

from fathorse.bowen import build_base_map
from fathorse.fatcantor import make_construction
from fathorse.horseshoe import make_poincare_system
from fathorse.lorenz import LorenzBranchMap


@pytest.fixture(scope="session")
def lorenz18():
    return LorenzBranchMap.from_coefficient(1.8)


@pytest.fixture(scope="session")
def construction18(lorenz18):
    return make_construction(lorenz18, 2.0)


@pytest.fixture(scope="session")
def bowen18(construction18):
    return build_base_map(construction18)


@pytest.fixture(scope="session")
def poincare18(bowen18):
    return make_poincare_system(bowen18)

import pytest

from gelkit import (
    FunctionalityVector,
    MonomerDistribution,
    SystemSpec,
    WeightMatrix,
)


def build_system(species, weights) -> SystemSpec:
    dist = MonomerDistribution(
        tuple((FunctionalityVector(tuple(c)), float(f)) for c, f in species)
    )
    return SystemSpec(distribution=dist, weights=WeightMatrix.from_rows(weights))


def single_2_5_system(w: float = 1.0) -> SystemSpec:
    return build_system((((2, 5), 1.0),), ((0.0, 1.0), (1.0, w)))


def a2b5_system(alpha: float, w: float) -> SystemSpec:
    return build_system(
        (((2, 0), alpha), ((0, 5), 1.0 - alpha)),
        ((0.0, 1.0), (1.0, w)),
    )


def three_type_system(alpha: float, beta: float, w: float = 0.1) -> SystemSpec:
    return build_system(
        (((2, 0), alpha), ((0, 2), beta), ((0, 5), 1.0 - alpha - beta)),
        ((0.0, 1.0), (1.0, w)),
    )


def flory_system(f: int = 3) -> SystemSpec:
    """Single group type, every monomer carrying f interchangeable groups."""
    return build_system((((f,), 1.0),), ((1.0,),))


@pytest.fixture
def single_2_5():
    return single_2_5_system()


@pytest.fixture
def a2b5_directed():
    return a2b5_system(0.5, 0.0)


@pytest.fixture
def flory3():
    return flory_system(3)

import math

import pytest

from isodimer.fisher import fisher_graph
from isodimer.graphs import skewed_honeycomb, standard_lattice
from isodimer.kasteleyn import KasteleynSystem

GENERIC_THETAS = (0.9, 1.1, math.pi - 2.0)
LATTICE_NAMES = ("square", "triangular", "honeycomb", "generic")


def make_lattice(name):
    if name == "generic":
        return skewed_honeycomb(GENERIC_THETAS)
    return standard_lattice(name)


@pytest.fixture(scope="session")
def lattices():
    return {name: make_lattice(name) for name in LATTICE_NAMES}


@pytest.fixture(scope="session")
def fishers(lattices):
    return {name: fisher_graph(g) for name, g in lattices.items()}


@pytest.fixture(scope="session")
def systems(fishers):
    return {name: KasteleynSystem(fg) for name, fg in fishers.items()}

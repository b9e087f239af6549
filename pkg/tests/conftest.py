import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ecoroutes.experiments import make_standin_network
from ecoroutes.network import all_pairs_shortest, bundled_sioux_falls


@pytest.fixture(scope="session")
def sioux_falls():
    return bundled_sioux_falls()


@pytest.fixture(scope="session")
def sioux_falls_dist(sioux_falls):
    return all_pairs_shortest(sioux_falls)


@pytest.fixture(scope="session")
def standin():
    return make_standin_network()


@pytest.fixture(scope="session")
def standin_dist(standin):
    return all_pairs_shortest(standin)

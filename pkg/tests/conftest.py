import random

import pytest

from polyunzip.lattice import random_polycube_tree


@pytest.fixture(scope="session")
def small_trees():
    rng = random.Random(12345)
    return [random_polycube_tree(rng.randint(1, 12), rng) for _ in range(40)]

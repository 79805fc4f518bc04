import pytest

from sporadic_games.harness import random_suite
from sporadic_games.task_model import JobSequence, TaskSystem


@pytest.fixture
def tight():
    return TaskSystem(((1, 2, 2), (2, 2, 2)), 1)


@pytest.fixture
def tight_witness():
    return JobSequence.from_mapping({0: (1, 2)}, 2)


@pytest.fixture(scope="session")
def suite():
    # 200 systems, n <= 3, parameters <= 4, m <= 2; fixed seed
    return random_suite(200, seed=2026)


def seq(mapping, n):
    return JobSequence.from_mapping(mapping, n)

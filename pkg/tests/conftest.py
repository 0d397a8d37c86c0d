from __future__ import annotations

import pytest

from nestedmzi import SimGrid, builtin_scenario


@pytest.fixture(scope="session")
def scenario_a():
    return builtin_scenario("a")


@pytest.fixture(scope="session")
def scenario_b():
    return builtin_scenario("b")


@pytest.fixture(scope="session")
def scenario_c():
    return builtin_scenario("c")


@pytest.fixture(scope="session")
def default_grid():
    return SimGrid()

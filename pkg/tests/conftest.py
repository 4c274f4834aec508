import numpy as np
import pytest

from cdcp.fixtures import generate_fixtures

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fixture_set(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixtures")
    index = generate_fixtures(root, n=10, seed=0)
    return root, index


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

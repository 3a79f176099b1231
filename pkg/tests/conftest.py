from __future__ import annotations

import pytest

from endslab import ModelManifold


@pytest.fixture(scope="session")
def two():
    return ModelManifold.two_end()


@pytest.fixture(scope="session")
def flat():
    return ModelManifold.flat()


@pytest.fixture(scope="session")
def asym():
    return ModelManifold.two_end(c_plus=0.3, c_minus=-0.2, neck_min=0.6)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects ``criterion N: PASS/FAIL`` lines for the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

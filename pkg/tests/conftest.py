import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vgclab.iprime import build_chain  # noqa: E402
from vgclab.sieve import sieve  # noqa: E402


@pytest.fixture(scope="session")
def table_1e6():
    return sieve(10**6)


@pytest.fixture(scope="session")
def chain_1e6(table_1e6):
    return build_chain(table_1e6, 4, 10**6)


@pytest.fixture(scope="session")
def table_small():
    return sieve(20_000)


@pytest.fixture(scope="session")
def chain_small(table_small):
    return build_chain(table_small, 3, 20_000)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (label, passed, detail)."""

    def record(label: str, passed: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)

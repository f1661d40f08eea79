import os
import sys
from pathlib import Path

import pytest

from kgraphlab import load_kgraph

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture(scope="session")
def fix_a():
    return load_kgraph(fixture_path("fix_a.kg"))


@pytest.fixture(scope="session")
def fix_b():
    return load_kgraph(fixture_path("fix_b.kg"))


@pytest.fixture(scope="session")
def fix_c():
    return load_kgraph(fixture_path("fix_c.kg"))


@pytest.fixture(scope="session")
def cube():
    return load_kgraph(fixture_path("fix_cube.kg"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])

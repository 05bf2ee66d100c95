import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pfaffdegen.familyfile import shipped_family  # noqa: E402
from pfaffdegen.report import Workbench  # noqa: E402

PUBLISHED = ("x5", "x7", "x10", "x25")
ALL = ("x5", "x7", "x10", "x13", "x25")


@lru_cache(maxsize=None)
def workbench(key: str) -> Workbench:
    """One cached workbench per shipped family, shared by every test module."""
    return Workbench(shipped_family(key))


@pytest.fixture(params=PUBLISHED)
def published(request):
    return workbench(request.param)


@pytest.fixture(params=ALL)
def family(request):
    return workbench(request.param)


@lru_cache(maxsize=None)
def shipped_verify_all():
    """Exit status and JSON report of ``verify-all`` on the shipped data, run once."""
    import json
    import tempfile

    from pfaffdegen.cli import main

    with tempfile.TemporaryDirectory() as d:
        out = Path(d) / "report.json"
        code = main(["verify-all", "--out", str(out)])
        return code, json.loads(out.read_text())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

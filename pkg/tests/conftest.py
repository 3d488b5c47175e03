import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption(
        "--run-extended",
        action="store_true",
        default=False,
        help="run the long simulation sweeps (also enabled by QCDFUZZY_EXTENDED=1)",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "extended: long-running simulation sweep, skipped by default")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-extended") or os.environ.get("QCDFUZZY_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="extended suite; pass --run-extended or set QCDFUZZY_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, {})

    def record(number, ok, detail):
        lines[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(lines[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])

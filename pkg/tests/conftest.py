import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criterion_lines: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")
    config.addinivalue_line("markers", "slow: runs a full-size experiment")


@pytest.fixture(scope="session", autouse=True)
def isolated_cache(tmp_path_factory):
    """Keep the prime cache inside the test session unless one is given."""
    if not os.environ.get("DEDEKIND_CACHE_DIR"):
        os.environ["DEDEKIND_CACHE_DIR"] = str(tmp_path_factory.mktemp("prime-cache"))
    yield


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marks = getattr(report, "criterion", None)
    if marks:
        n, text = marks
        status = "PASS" if report.passed else "FAIL"
        _criterion_lines[n] = f"criterion {n:2d} {status}  {text}"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark:
        rep.criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criterion_lines):
        terminalreporter.write_line(_criterion_lines[n])

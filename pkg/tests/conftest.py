from importlib import resources
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"

_criteria = {}
_criteria_results = {}


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return Path(str(resources.files("toonbench") / "fixtures"))


@pytest.fixture(scope="session")
def corpus_path(fixtures_dir) -> Path:
    return fixtures_dir / "corpus.jsonl"


@pytest.fixture(scope="session")
def replay_path(fixtures_dir) -> Path:
    return fixtures_dir / "replay.jsonl"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _criteria.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    ok = report.outcome == "passed"
    prev = _criteria_results.get(number)
    _criteria_results[number] = (title, ok if prev is None else prev[1] and ok, report.duration)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criteria[item.nodeid] = m.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria_results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria_results):
        title, ok, duration = _criteria_results[number]
        terminalreporter.write_line(f"AC{number} {'PASS' if ok else 'FAIL'}  {title}  ({duration:.2f}s)")

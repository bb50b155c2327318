from pathlib import Path

import pytest

from qcforge.textfmt import read_file

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def worked():
    return read_file(DATA / "worked.qc")


@pytest.fixture
def lowered():
    return read_file(DATA / "worked_lowered.qc")


@pytest.fixture
def optimized():
    return read_file(DATA / "worked_optimized.qc")


_criteria: dict[int, tuple[str, str, float]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    outcome = "PASS" if call.excinfo is None else "FAIL"
    _criteria[number] = (title, outcome, call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcome, duration = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {outcome}  {title}  ({duration:.2f}s)")

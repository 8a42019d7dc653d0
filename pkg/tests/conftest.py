from pathlib import Path

import pytest

import pragtree
from pragtree.transcript import parse_transcript

DATA = Path(pragtree.__file__).parent / "data"
FIXTURES = Path(__file__).parent / "fixtures"

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported at the end")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _criteria.append((marker.args[0], item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, test, passed in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  ({test})")


@pytest.fixture
def extract1():
    return parse_transcript((DATA / "extract1.sdrt").read_bytes())


@pytest.fixture
def extract2():
    return parse_transcript((DATA / "extract2.sdrt").read_bytes())


@pytest.fixture(scope="session")
def sequence_records():
    from pragtree.transcript import load_sequence_records

    return load_sequence_records((DATA / "sequences.csv").read_bytes())

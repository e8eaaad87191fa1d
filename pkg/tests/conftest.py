"""Shared fixtures and the acceptance-criteria summary.

Tests marked ``criterion(n, label)`` are tallied per criterion and a one-line
PASS/FAIL verdict for each is printed at the end of the run. Checks that need
the replication dataset skip unless TOKENLAB_REPLICATION_DIR points at it.
"""

import os
from pathlib import Path

import pytest
from hypothesis import settings

from tokenlab import RunConfig, fetch_catalog, load_milestones, load_training

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

REPLICATION_ENV = "TOKENLAB_REPLICATION_DIR"

settings.register_profile("tokenlab", deadline=None)
settings.load_profile("tokenlab")


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(number, label): tie a test to one acceptance criterion "
        "for the end-of-run summary",
    )


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def milestones():
    return load_milestones(DATA_DIR / "milestones.csv")


@pytest.fixture(scope="session")
def training():
    return load_training(DATA_DIR / "training.csv")


@pytest.fixture(scope="session")
def catalog_records():
    return fetch_catalog("unused", fixture_path=DATA_DIR / "catalog.json").records


@pytest.fixture(scope="session")
def config() -> RunConfig:
    return RunConfig()


@pytest.fixture(scope="session")
def replication_dir() -> Path:
    """Directory with the replication dataset, or skip."""
    root = os.environ.get(REPLICATION_ENV)
    if not root:
        pytest.skip(f"replication dataset not available (set {REPLICATION_ENV})")
    path = Path(root)
    if not path.is_dir():
        pytest.skip(f"{REPLICATION_ENV}={root} is not a directory")
    return path


_tally: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, label = marker.args
    entry = _tally.setdefault(
        number, {"label": label, "passed": 0, "failed": 0, "skipped": 0}
    )
    if report.when == "call":
        entry["passed" if report.passed else
              "failed" if report.failed else "skipped"] += 1
    elif report.when == "setup" and not report.passed:
        entry["failed" if report.failed else "skipped"] += 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _tally:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_tally):
        entry = _tally[number]
        status = "FAIL" if entry["failed"] else "PASS"
        parts = [f"{entry['passed']} passed"]
        if entry["failed"]:
            parts.append(f"{entry['failed']} failed")
        if entry["skipped"]:
            parts.append(f"{entry['skipped']} skipped awaiting replication data")
        terminalreporter.write_line(
            f"{status}  criterion {number}: {entry['label']} ({', '.join(parts)})"
        )

import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ANXIETY_LABELS = ("MPA", "GAD", "SAD", "PD", "AG", "SP", "SEP", "ILL")

_acceptance_lines = []


def find_anxieties():
    """Location of the anxieties CSV, or None.

    Looked up as ``anxieties.csv`` in ``$ROBGGM_DATA_DIR`` and in
    ``tests/data``.
    """
    candidates = []
    if os.environ.get("ROBGGM_DATA_DIR"):
        candidates.append(Path(os.environ["ROBGGM_DATA_DIR"]) / "anxieties.csv")
    candidates.append(Path(__file__).parent / "data" / "anxieties.csv")
    for path in candidates:
        if path.is_file():
            return path
    return None


@pytest.fixture
def rng():
    return np.random.default_rng(20221201)


@pytest.fixture(scope="session")
def anxieties():
    from robggm.io import ingest_csv

    path = find_anxieties()
    if path is None:
        pytest.skip("anxieties.csv not found (set ROBGGM_DATA_DIR or add tests/data/anxieties.csv)")
    data = ingest_csv(path)
    # reorder columns into the published order
    order = [data.column_names.index(name) for name in ANXIETY_LABELS]
    from robggm.mestimator import DataMatrix

    return DataMatrix(data.values[:, order], ANXIETY_LABELS)


@pytest.fixture
def criterion():
    """Marks a test as an acceptance criterion; its outcome is listed at the end of the run."""
    yield


def _record_criterion(item, rep):
    status = "SKIP" if rep.skipped else ("PASS" if rep.passed else "FAIL")
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    _acceptance_lines.append(f"[{status}] {doc}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if "criterion" not in getattr(item, "fixturenames", ()):
        return
    # one line per criterion: the call outcome, or a failed/skipped setup
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _record_criterion(item, rep)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)

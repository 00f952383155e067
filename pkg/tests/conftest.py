import sys
from pathlib import Path

import pytest

from delaylearn.config import load_config
from delaylearn.dataio import load_dataset

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT / "data"
TABLE1 = ROOT / "configs" / "table1.cfg"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def table1():
    return load_config(TABLE1)


@pytest.fixture(scope="session")
def dataset(table1):
    return load_dataset(DATA_DIR, table1.images_file, table1.labels_file)


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    return request.param


# one line per acceptance criterion, filled by tests/test_acceptance.py
VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

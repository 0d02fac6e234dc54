from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURE_DIR = Path(__file__).parent.parent / "fixtures"


def pytest_addoption(parser):
    parser.addoption(
        "--run-large",
        action="store_true",
        default=False,
        help="run the long-running large-molecule fixture checks",
    )


def fixture_tensors(name: str):
    from hampart.tensors import load_fcidump

    return load_fcidump(FIXTURE_DIR / f"{name}.fcidump")


def fixture_meta(name: str) -> dict:
    return json.loads((FIXTURE_DIR / f"{name}.meta.json").read_text())


@pytest.fixture(scope="session")
def h2():
    return fixture_tensors("h2")


@pytest.fixture(scope="session")
def h2_meta():
    return fixture_meta("h2")


@pytest.fixture(scope="session")
def lih():
    return fixture_tensors("lih")


@pytest.fixture(scope="session")
def lih_meta():
    return fixture_meta("lih")

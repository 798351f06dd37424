from __future__ import annotations

import os

import numpy as np
import pytest

from walshlab.funcrep import GridFunction2D

# Default tolerances; each can be overridden with WALSHLAB_TOL_<NAME>.
DEFAULT_TOLERANCES = {
    "FWHT": 1e-12,
    "CESARO_NUMBERS": 1e-10,
    "ROUTES": 1e-8,
    "IDENTITY": 1e-8,
    "EXACTNESS": 1e-12,
    "REFINE": 1e-14,
}


def tolerance(name: str) -> float:
    return float(os.environ.get(f"WALSHLAB_TOL_{name}", DEFAULT_TOLERANCES[name]))


@pytest.fixture
def tol():
    return tolerance


CORPUS_SEED = 20240601


def grid_corpus(count: int, resolution: int = 2, seed: int = CORPUS_SEED) -> list[GridFunction2D]:
    rng = np.random.default_rng(seed)
    return [GridFunction2D.random(resolution, rng) for _ in range(count)]


@pytest.fixture(scope="session")
def corpus200() -> list[GridFunction2D]:
    return grid_corpus(200)


# One line per acceptance criterion, filled by test_acceptance.py and
# repeated in the terminal summary so the verdicts show without ``-s``.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

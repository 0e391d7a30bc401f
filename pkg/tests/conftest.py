import time

import numpy as np
import pytest

from hashbench.attacks import default_grid
from hashbench.bench import inter_test, intra_test
from hashbench.hashes import ALGORITHMS
from hashbench.raster import RasterImage
from hashbench.synthetic import synthetic_corpus

DESK_SEED = 42

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def desk_corpus():
    return synthetic_corpus(10)


@pytest.fixture(scope="session")
def desk_report(desk_corpus):
    """Full default-grid intra-test over the desk corpus, timed, single process."""
    start = time.perf_counter()
    report = intra_test(desk_corpus, ALGORITHMS, default_grid(), DESK_SEED, jobs=1)
    report.elapsed = time.perf_counter() - start
    return report


@pytest.fixture(scope="session")
def desk_inter(desk_corpus):
    return inter_test(desk_corpus, ALGORITHMS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_rgb(rng):
    return RasterImage(rng.integers(20, 236, size=(24, 32, 3), dtype=np.uint8))


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)

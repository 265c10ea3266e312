import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kbmf.matrix import BinaryMatrix, Rank1Pattern

settings.register_profile("kbmf", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("kbmf")


def matrix(rows) -> BinaryMatrix:
    """BinaryMatrix from strings like "10?"."""
    codes = {"0": 0, "1": 1, "?": -1}
    return BinaryMatrix.from_array([[codes[ch] for ch in r] for r in rows])


def random_matrix(rng, n, m, density=0.5, missing=0.0) -> BinaryMatrix:
    vals = (rng.random((n, m)) < density).astype(float)
    if missing:
        vals[rng.random((n, m)) < missing] = -1
    return BinaryMatrix.from_array(vals)


@pytest.fixture
def three_by_three():
    # the 3x3 example with an exact rank-2 Boolean factorisation
    return matrix(["110", "111", "011"])


@pytest.fixture
def j4_minus_i4():
    return matrix(["0111", "1011", "1101", "1110"])


def six_rectangles():
    """The six 2x2 all-ones blocks of J4 - I4 that avoid the diagonal."""
    rows_cols = [((0, 1), (2, 3)), ((2, 3), (0, 1)), ((0, 2), (1, 3)), ((1, 3), (0, 2)),
                 ((0, 3), (1, 2)), ((1, 2), (0, 3))]
    return [Rank1Pattern.from_rows_cols(4, 4, r, c) for r, c in rows_cols]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion, echoed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

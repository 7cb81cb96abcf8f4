from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from ambiball.extreme_sets import CenterSpec
from ambiball.measures import DiscreteMeasure
from ambiball.metric_space import FiniteMetricSpace, validate_metric

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def two_point():
    """X = {a, b} with d(a, b) = 1."""
    return validate_metric([[0, 1], [1, 0]], ["a", "b"])


@pytest.fixture
def two_point_close():
    """X = {a, b} with d(a, b) = 0.4."""
    return validate_metric([[0, 0.4], [0.4, 0]], ["a", "b"])


@pytest.fixture
def golden_center(two_point):
    return CenterSpec(two_point, (0,), (1.0,), 0.3)


@pytest.fixture
def golden_center_exact(two_point):
    return CenterSpec(two_point, (0,), (Fraction(1),), Fraction(3, 10))


@pytest.fixture
def line4():
    """Four points on a line at 0, 0.25, 0.6, 1."""
    x = np.array([0.0, 0.25, 0.6, 1.0])
    return validate_metric(np.abs(x[:, None] - x[None, :]), ["p", "q", "r", "s"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.acceptance_lines

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(config.acceptance_lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

import itertools
import os

import pytest


def cube(depth):
    return ["".join(b) for b in itertools.product("01", repeat=depth)]


def all_subsets(points):
    pts = sorted(points)
    for r in range(len(pts) + 1):
        yield from itertools.combinations(pts, r)


def brute_max_member(family, points):
    """Largest member by looking at every subset."""
    return max((len(s) for s in all_subsets(points) if family.member(s)), default=0)


def brute_density(family, ground, n):
    return min(brute_max_member(family, c) for c in itertools.combinations(sorted(ground), n))


@pytest.fixture
def cube_points():
    return cube


def pytest_configure(config):
    os.environ.setdefault("CANTORFILL_BUDGET", "2000000")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

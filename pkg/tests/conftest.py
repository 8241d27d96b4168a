import itertools
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fatcast.genlab import platonic  # noqa: E402
from fatcast.geometry import build_hull  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def cube():
    return build_hull(np.array(list(itertools.product((-1.0, 1.0), repeat=3))))


@pytest.fixture(scope="session")
def unit_tetra():
    return build_hull(np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], dtype=float))


@pytest.fixture(scope="session")
def regular_tetra():
    return platonic("tetrahedron")


@pytest.fixture(scope="session")
def lens():
    """Triangle C in z = 0; edge YZ is a diagonal of a tilted quad facet, XY and XZ are edges of P."""
    pts = np.array([(0, 2, 0), (-1.5, -1, 0), (1.5, -1, 0), (0, -1.3, 0.5), (0, -0.7, -0.5),
                    (0, 0, 1.2), (0, 0, -1.2)], dtype=float)
    return build_hull(pts)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

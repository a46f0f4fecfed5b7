import numpy as np
import pytest

from antcircles.imageio import EdgeMap, rasterize_circle

ACCEPTANCE_LINES: list[str] = []


def reference_midpoint(r: int, x0: int = 0, y0: int = 0) -> set:
    """Textbook integer midpoint circle with eight-way symmetry."""
    pts = set()
    x, y, p = 0, r, 1 - r
    while x <= y:
        for a, b in ((x, y), (y, x), (-x, y), (-y, x), (x, -y), (y, -x), (-x, -y), (-y, -x)):
            pts.add((x0 + a, y0 + b))
        x += 1
        if p < 0:
            p += 2 * x + 1
        else:
            y -= 1
            p += 2 * (x - y) + 1
    return pts


def adjacent(a, b) -> bool:
    return a != b and abs(a[0] - b[0]) <= 1 and abs(a[1] - b[1]) <= 1


def neighbor_count(p, pts) -> int:
    return sum((p[0] + dx, p[1] + dy) in pts
               for dx in (-1, 0, 1) for dy in (-1, 0, 1) if dx or dy)


def circles_map(size, *circles) -> EdgeMap:
    m = EdgeMap.empty(size, size) if isinstance(size, int) else EdgeMap.empty(*size)
    for cx, cy, r in circles:
        m = rasterize_circle(cx, cy, r, m)
    return m


@pytest.fixture
def crossing_pair() -> EdgeMap:
    """r=40 and r=35, centers 50 px apart, on 256x256."""
    return circles_map(256, (103, 128, 40), (153, 128, 35))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

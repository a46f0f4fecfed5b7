"""Seeded synthetic compositions with exact ground truth."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .imageio import (
    EdgeMap, GroundTruth, rasterize_circle, rasterize_ellipse, rasterize_line, rasterize_polygon,
)


def regular_polygon(cx: float, cy: float, radius: float, sides: int,
                    rotation: float = 0.0) -> list[tuple[float, float]]:
    return [
        (cx + radius * math.cos(rotation + 2 * math.pi * k / sides),
         cy + radius * math.sin(rotation + 2 * math.pi * k / sides))
        for k in range(sides)
    ]


def square(cx: float, cy: float, side: float) -> list[tuple[float, float]]:
    h = side / 2
    return [(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)]


def draw(truth: GroundTruth, width: int, height: int) -> EdgeMap:
    """Rasterize every shape listed in ``truth``."""
    canvas = EdgeMap.empty(width, height)
    for cx, cy, r in truth.circles:
        canvas = rasterize_circle(cx, cy, r, canvas)
    for d in truth.distractors:
        kind = d["kind"]
        if kind == "ellipse":
            canvas = rasterize_ellipse(d["cx"], d["cy"], d["a"], d["b"], canvas)
        elif kind == "polygon":
            canvas = rasterize_polygon(d["vertices"], canvas)
        elif kind == "line":
            canvas = rasterize_line(*d["p0"], *d["p1"], canvas)
        else:
            raise ValueError(f"unknown distractor kind {kind!r}")
    return canvas


def random_composition(rng: np.random.Generator, size: int = 256, n_circles=(1, 4),
                       radius=(15.0, 60.0), margin: float = 20.0, n_lines=(0, 0),
                       integer: bool = True) -> tuple[EdgeMap, GroundTruth]:
    """Random circles (plus optional straight-line distractors), all circles fully on canvas.

    Centers keep at least ``margin`` px from the border and every circle keeps
    2 px clear of it, so each one is a closed curve. Overlaps are allowed.
    """
    k = int(rng.integers(n_circles[0], n_circles[1] + 1))
    circles = []
    for _ in range(k):
        r = float(rng.uniform(*radius))
        if integer:
            r = float(round(r))
        lo = max(margin, r + 2)
        hi = size - 1 - lo
        cx, cy = rng.uniform(lo, hi, size=2)
        if integer:
            cx, cy = float(round(cx)), float(round(cy))
        circles.append((float(cx), float(cy), r))
    lines = []
    for _ in range(int(rng.integers(n_lines[0], n_lines[1] + 1))):
        p0 = [int(v) for v in rng.integers(0, size, size=2)]
        p1 = [int(v) for v in rng.integers(0, size, size=2)]
        lines.append({"kind": "line", "p0": p0, "p1": p1})
    truth = GroundTruth(circles, lines)
    return draw(truth, size, size), truth


def random_non_circle(rng: np.random.Generator, size: int = 256,
                      kind: Optional[str] = None) -> tuple[EdgeMap, GroundTruth]:
    """One square, ellipse (axis ratio >= 1.3, minor semi-axis >= 15) or regular triangle."""
    kind = kind or ("square", "ellipse", "triangle")[int(rng.integers(0, 3))]
    c = size / 2
    if kind == "square":
        side = float(rng.integers(30, 81))
        d = {"kind": "polygon", "shape": "square", "vertices": square(c, c, side)}
    elif kind == "ellipse":
        b = float(rng.uniform(15, 50))
        a = b * float(rng.uniform(1.3, 2.0))
        if rng.integers(0, 2):
            a, b = b, a
        d = {"kind": "ellipse", "cx": c, "cy": c, "a": a, "b": b}
    elif kind == "triangle":
        rad = float(rng.uniform(20, 70))
        rot = float(rng.uniform(0, 2 * math.pi))
        d = {"kind": "polygon", "shape": "triangle",
             "vertices": regular_polygon(c, c, rad, 3, rot)}
    else:
        raise ValueError(f"unknown shape {kind!r}")
    truth = GroundTruth([], [d])
    return draw(truth, size, size), truth

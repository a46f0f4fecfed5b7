"""Circle test for closed pixel loops.

Three equally spaced loop pixels define a candidate circle; the loop is a
circle when every pixel sits within a radius-dependent band around it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .imageio import Pixel

COLLINEAR_EPS = 1e-9
REDRAWS_PER_TRIAL = 8


class CollinearError(ValueError):
    """The three points do not span a triangle."""


@dataclass(frozen=True)
class FitConfig:
    tol_abs: float = 1.5
    tol_rel: float = 0.04
    min_radius: float = 5.0
    min_loop_length: int = 20
    trials: int = 3
    seed: int = 0

    def __post_init__(self):
        if not self.tol_abs > 0:
            raise ValueError("tol_abs must be > 0")
        if not 0 <= self.tol_rel < 1:
            raise ValueError("tol_rel must be in [0, 1)")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.min_loop_length < 3:
            raise ValueError("min_loop_length must be >= 3")


@dataclass(frozen=True)
class CircleHit:
    cx: float
    cy: float
    r: float
    loop_length: int
    max_deviation: float
    source: str = ""
    loop: tuple = field(default=(), repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "cx": self.cx,
            "cy": self.cy,
            "r": self.r,
            "loop_length": self.loop_length,
            "max_deviation": self.max_deviation,
        }


@dataclass(frozen=True)
class Rejected:
    reason: str  # too_short | all_trials_failed | collinear_exhausted | radius_too_small

    def __bool__(self):
        return False


def circumcircle(p1, p2, p3) -> tuple[float, float, float]:
    """Center and radius of the circle through three points."""
    ax, ay = float(p1[0]), float(p1[1])
    bx, by = float(p2[0]) - ax, float(p2[1]) - ay
    cx, cy = float(p3[0]) - ax, float(p3[1]) - ay
    cross = bx * cy - by * cx  # twice the signed triangle area
    if abs(cross) < COLLINEAR_EPS:
        raise CollinearError(f"collinear points {p1}, {p2}, {p3}")
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / (2.0 * cross)
    uy = (bx * c2 - cx * b2) / (2.0 * cross)
    return ax + ux, ay + uy, math.hypot(ux, uy)


def sample_equidistant(loop: Sequence[Pixel], offset: int, min_loop_length: int = 3):
    n = len(loop)
    if n < min_loop_length or n == 0:
        raise ValueError(f"loop of length {n} is shorter than {min_loop_length}")
    return (
        loop[offset % n],
        loop[(offset + n // 3) % n],
        loop[(offset + (2 * n) // 3) % n],
    )


def tolerance(r: float, cfg: FitConfig = FitConfig()) -> float:
    return max(cfg.tol_abs, cfg.tol_rel * r)


def radial_deviation(pts: np.ndarray, cx: float, cy: float, r: float) -> np.ndarray:
    return np.abs(np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) - r)


def winding_number(pts: np.ndarray, cx: float, cy: float) -> int:
    """Times the closed loop ``pts`` turns around ``(cx, cy)``."""
    ang = np.arctan2(pts[:, 1] - cy, pts[:, 0] - cx)
    step = np.diff(np.append(ang, ang[0]))
    step = (step + np.pi) % (2 * np.pi) - np.pi
    return int(round(float(step.sum()) / (2 * np.pi)))


def trial_offsets(n: int, cfg: FitConfig, loop_id: int = 0) -> list[int]:
    """Seeded offsets for one loop: ``trials * REDRAWS_PER_TRIAL`` draws."""
    rng = np.random.default_rng([cfg.seed, loop_id])
    return rng.integers(0, n, size=cfg.trials * REDRAWS_PER_TRIAL).tolist()


def test_loop(loop: Sequence[Pixel], cfg: FitConfig = FitConfig(), loop_id: int = 0,
              offsets: Optional[Sequence[int]] = None, source: str = ""):
    """Return a CircleHit for a circular loop, otherwise a falsy Rejected.

    ``offsets`` overrides the seeded draws; it is consumed in order, a
    collinear triple moving on to the next offset within the same trial.
    """
    n = len(loop)
    if n < cfg.min_loop_length:
        return Rejected("too_short")
    pts = np.asarray(loop, dtype=np.float64)
    if offsets is None:
        offsets = trial_offsets(n, cfg, loop_id)
    draws = iter(offsets)
    n_collinear = n_small = n_tried = 0
    for _ in range(cfg.trials):
        fit = None
        for _ in range(REDRAWS_PER_TRIAL):
            off = next(draws, None)
            if off is None:
                break
            try:
                fit = circumcircle(*sample_equidistant(loop, off, cfg.min_loop_length))
                break
            except CollinearError:
                n_collinear += 1
        if fit is None:
            continue
        n_tried += 1
        cx, cy, r = fit
        if r < cfg.min_radius:
            n_small += 1
            continue
        dev = radial_deviation(pts, cx, cy, r)
        worst = float(dev.max())
        # A thin loop can hug a huge circle without going round it.
        if worst <= tolerance(r, cfg) and abs(winding_number(pts, cx, cy)) == 1:
            return CircleHit(cx, cy, r, n, worst, source, tuple(loop))
    if n_tried == 0:
        return Rejected("collinear_exhausted")
    if n_small == n_tried:
        return Rejected("radius_too_small")
    return Rejected("all_trials_failed")


test_loop.__test__ = False  # not a pytest test despite the name


def dedupe_hits(hits: Sequence[CircleHit], center_tol: float = 2.0,
                radius_tol: float = 2.0) -> list[CircleHit]:
    """Merge hits describing the same circle, keeping the tighter fit."""
    kept: list[CircleHit] = []
    for h in hits:
        for i, k in enumerate(kept):
            if (math.hypot(h.cx - k.cx, h.cy - k.cy) <= center_tol
                    and abs(h.r - k.r) <= radius_tol):
                if h.max_deviation < k.max_deviation:
                    kept[i] = h
                break
        else:
            kept.append(h)
    return kept

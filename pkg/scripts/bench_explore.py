#!/usr/bin/env python3
"""Exploration time versus edge-pixel count for a fixed two-node topology.

Two crossing circles are scaled by 1, 2, 4, ... on a canvas sized for the
largest scale, so only the edge count changes between rows.
"""

import argparse
import time

from antcircles.explorer import explore
from antcircles.imageio import EdgeMap, rasterize_circle


def scene(scale: int, size: int) -> EdgeMap:
    cx, cy = size / 2 - 25 * scale, size / 2
    m = rasterize_circle(cx, cy, 40 * scale, EdgeMap.empty(size, size))
    return rasterize_circle(cx + 50 * scale, cy, 35 * scale, m)


def best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-scale", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=9)
    args = ap.parse_args()

    scales = [1]
    while scales[-1] * 2 <= args.max_scale:
        scales.append(scales[-1] * 2)
    size = 130 * scales[-1] + 10
    print(f"{'scale':>5} {'N_e':>7} {'nodes':>5} {'branches':>8} {'ms':>8} {'us/px':>7}")
    for s in scales:
        m = scene(s, size)
        g = explore(m)
        t = best_of(lambda: explore(m), args.repeats)
        print(f"{s:>5} {m.edge_count:>7} {len(g.nodes):>5} {len(g.branches):>8} "
              f"{t * 1e3:>8.2f} {t / m.edge_count * 1e6:>7.2f}")


if __name__ == "__main__":
    main()

"""End-to-end detection: explore, enumerate cycles, assemble loops, test, dedupe."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .circlefit import CircleHit, FitConfig, dedupe_hits, test_loop
from .explorer import explore
from .graph import CycleLimits, PixelGraph, assemble_loop, enumerate_cycles
from .imageio import EdgeMap


@dataclass(frozen=True)
class DetectConfig:
    fit: FitConfig = field(default_factory=FitConfig)
    limits: CycleLimits = field(default_factory=CycleLimits)
    random_start: bool = False
    threshold: int = 128
    invert: bool = False

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "invert": self.invert,
            "seed": self.fit.seed,
            "tol_abs": self.fit.tol_abs,
            "tol_rel": self.fit.tol_rel,
            "min_radius": self.fit.min_radius,
            "min_loop_length": self.fit.min_loop_length,
            "trials": self.fit.trials,
            "max_cycles": self.limits.max_cycles,
            "max_cycle_branches": self.limits.max_branches,
            "random_start": self.random_start,
        }


@dataclass
class DetectReport:
    hits: list[CircleHit]
    graph: PixelGraph
    cycles: int
    truncated: bool
    timing: dict
    config: DetectConfig

    def graph_summary(self) -> dict:
        g = self.graph
        return {
            "nodes": len(g.nodes),
            "branches": len(g.branches),
            "standalone_loops": len(g.standalone_loops),
            "edge_pixels": g.stats.edge_pixel_count,
            "cycles": self.cycles,
            "truncated": self.truncated,
        }

    def to_json(self, timing: bool = True) -> dict:
        t = self.timing if timing else {k: 0.0 for k in self.timing}
        return {
            "hits": [h.to_json() for h in self.hits],
            "graph": self.graph_summary(),
            "timing": t,
            "config": self.config.to_json(),
        }


def detect(edges: EdgeMap, config: DetectConfig = DetectConfig()) -> DetectReport:
    t0 = time.perf_counter()
    graph = explore(edges, seed=config.fit.seed if config.random_start else None)
    t1 = time.perf_counter()
    found = enumerate_cycles(graph, config.limits)
    t2 = time.perf_counter()

    hits: list[CircleHit] = []
    n_loops = len(graph.standalone_loops)
    for j, loop in enumerate(graph.standalone_loops):
        hit = test_loop(loop, config.fit, loop_id=j, source=f"loop:{j}")
        if hit:
            hits.append(hit)
    bridges: dict = {}
    for i, cycle in enumerate(found.cycles):
        loop = assemble_loop(graph, cycle, bridges)
        hit = test_loop(loop, config.fit, loop_id=n_loops + i, source=f"cycle:{i}")
        if hit:
            hits.append(hit)
    hits = dedupe_hits(hits)
    t3 = time.perf_counter()

    timing = {
        "explore_ms": round((t1 - t0) * 1e3, 3),
        "cycles_ms": round((t2 - t1) * 1e3, 3),
        "fit_ms": round((t3 - t2) * 1e3, 3),
    }
    return DetectReport(hits, graph, len(found.cycles), found.truncated, timing, config)

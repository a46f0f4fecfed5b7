"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or via ``-m acceptance``.
The lines are also collected into a summary section at the end of the run.
"""

import json
import math
import statistics
import time

import numpy as np
import pytest

from antcircles.circlefit import CollinearError, circumcircle
from antcircles.explorer import Explorer, explore
from antcircles.graph import BranchKind, enumerate_cycles
from antcircles.imageio import save_edge_map
from antcircles.pipeline import detect
from antcircles.synth import random_composition, random_non_circle
from antcircles.cli import main as cli_main

from conftest import ACCEPTANCE_LINES, circles_map
from test_explorer import check_graph
from test_graph import brute_force_cycles, make_graph

pytestmark = pytest.mark.acceptance


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def composition_corpus(n: int, base: int, **kw):
    return [random_composition(np.random.default_rng(base + i), integer=False, **kw)
            for i in range(n)]


@pytest.fixture(scope="module")
def structure_corpus():
    return [m for m, _ in composition_corpus(50, 1000, n_lines=(0, 2))]


@pytest.fixture(scope="module")
def recall_corpus():
    return composition_corpus(100, 2000)


def test_01_visit_once(structure_corpus):
    bad = 0
    t0 = time.perf_counter()
    for edges in structure_corpus:
        ex = Explorer(edges)
        g = ex.explore()
        if g.stats.visit_events != edges.edge_count or ex.visited != set(edges.points()):
            bad += 1
    elapsed = time.perf_counter() - t0
    record(1, "visit-once", bad == 0 and elapsed < 5.0,
           f"{len(structure_corpus) - bad}/{len(structure_corpus)} images exact, {elapsed:.2f} s (< 5 s)")


def _partition_ok(edges, g) -> bool:
    seen = [p for n in g.nodes for p in n.pixels]
    seen += [p for b in g.branches for p in b.trace]
    seen += [p for loop in g.standalone_loops for p in loop]
    return len(seen) == len(set(seen)) and set(seen) == set(edges.points())


def test_02_partition(structure_corpus, recall_corpus):
    images = structure_corpus + [m for m, _ in recall_corpus]
    failures = sum(not _partition_ok(m, explore(m)) for m in images)
    for m in images[:10]:
        check_graph(m, explore(m))
    record(2, "partition", failures == 0,
           f"{len(images) - failures}/{len(images)} images partition exactly")


def test_03_incidence(structure_corpus, recall_corpus):
    columns = bad = 0
    for m in structure_corpus + [m for m, _ in recall_corpus]:
        g = explore(m)
        for b in g.branches:
            col = g.incidence[:, b.index]
            if b.kind is BranchKind.NORMAL:
                columns += 1
                bad += not ((col == 1).sum() == 1 and (col == -1).sum() == 1 and col.sum() == 0)
            else:
                bad += bool(col.any())
    record(3, "incidence", bad == 0, f"{columns} normal columns checked, {bad} malformed")


def test_04_topology_fixture(crossing_pair):
    report = detect(crossing_pair)
    g = report.graph
    truth = [(103, 128, 40), (153, 128, 35)]
    oracle = len(brute_force_cycles(len(g.nodes), [b.endpoints for b in g.branches]))
    matched = all(any(abs(h.cx - cx) <= 2 and abs(h.cy - cy) <= 2 and abs(h.r - r) <= 2
                      for h in report.hits) for cx, cy, r in truth)
    ok = (len(g.nodes), len(g.branches), report.cycles, oracle, len(report.hits)) == (2, 4, 6, 6, 2)
    record(4, "topology fixture", ok and matched,
           f"nodes={len(g.nodes)} branches={len(g.branches)} cycles={report.cycles} "
           f"(oracle {oracle}) hits={len(report.hits)}")


def test_05_cycle_oracle():
    rng = np.random.default_rng(5)
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(0, 11))
        edges = [tuple(int(v) for v in rng.integers(0, n, size=2)) for _ in range(m)]
        got = [frozenset(c.branch_ids) for c in enumerate_cycles(make_graph(n, edges))]
        if len(got) != len(set(got)) or set(got) != brute_force_cycles(n, edges):
            mismatches += 1
    record(5, "cycle oracle", mismatches == 0, f"{200 - mismatches}/200 multigraphs match brute force")


def test_06_recall(recall_corpus):
    total = found = 0
    t0 = time.perf_counter()
    for edges, truth in recall_corpus:
        hits = detect(edges).hits
        for cx, cy, r in truth.circles:
            total += 1
            found += any(math.hypot(h.cx - cx, h.cy - cy) <= 2 and abs(h.r - r) <= 2 for h in hits)
    elapsed = time.perf_counter() - t0
    recall = found / total
    record(6, "detection recall", recall >= 0.95 and elapsed < 30.0,
           f"{found}/{total} = {recall:.1%} (>= 95%), {elapsed:.2f} s (< 30 s)")


def test_07_shape_rejection():
    kinds = ("square", "ellipse", "triangle")
    hits = 0
    for i in range(100):
        edges, _ = random_non_circle(np.random.default_rng(3000 + i), kind=kinds[i % 3])
        hits += len(detect(edges).hits)
    record(7, "shape rejection", hits == 0, f"{hits} hits on 100 non-circles")


def test_08_circumcircle():
    rng = np.random.default_rng(8)
    worst, tested = 0.0, 0
    while tested < 1000:
        pts = [tuple(p) for p in rng.uniform(-300, 300, size=(3, 2))]
        (ax, ay), (bx, by), (cx, cy) = pts
        if abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)) < 1e-3:
            continue
        ox, oy, r = circumcircle(*pts)
        worst = max(worst, max(abs(math.hypot(x - ox, y - oy) - r) for x, y in pts))
        tested += 1
    collinear = 0
    for _ in range(200):
        p = rng.integers(-100, 100, size=2)
        d = rng.integers(-20, 21, size=2)
        s, t = rng.integers(-5, 6, size=2)
        try:
            circumcircle(tuple(p), tuple(p + s * d), tuple(p + t * d))
        except CollinearError:
            collinear += 1
    record(8, "circumcircle exactness", worst <= 1e-6 and collinear == 200,
           f"max residual {worst:.2e} px over 1000 triples, {collinear}/200 collinear flagged")


def test_09_determinism(tmp_path, recall_corpus, structure_corpus):
    images = [m for m, _ in recall_corpus] + structure_corpus
    differing = 0
    for i, edges in enumerate(images):
        path = tmp_path / f"img{i}.pgm"
        save_edge_map(edges, path)
        outs = []
        for run in range(2):
            out = tmp_path / f"r{i}_{run}.json"
            assert cli_main(["detect", str(path), "--no-timing", "--seed", "3", "-o", str(out)]) == 0
            outs.append(out.read_bytes())
        differing += outs[0] != outs[1]
        json.loads(outs[0])
    record(9, "determinism", differing == 0,
           f"{len(images) - differing}/{len(images)} reports byte-identical across two runs")


def _min_time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_10_efficiency():
    big = circles_map(512, (150, 150, 80), (240, 150, 70), (340, 360, 90), (420, 360, 60))
    g = explore(big)
    times = []
    for _ in range(5):
        t0 = time.perf_counter()
        detect(big)
        times.append(time.perf_counter() - t0)
    detect_ms = statistics.median(times) * 1000

    # same canvas, same two-node topology, every length doubled
    small = circles_map(512, (206, 256, 40), (256, 256, 35))
    large = circles_map(512, (206, 256, 80), (306, 256, 70))
    g1, g2 = explore(small), explore(large)
    same_topology = (len(g1.nodes), len(g1.branches)) == (len(g2.nodes), len(g2.branches))
    t1 = _min_time(lambda: explore(small), 15)
    t2 = _min_time(lambda: explore(large), 15)
    n1, n2 = small.edge_count, large.edge_count
    bound = 1.25 * n2 / n1
    ok = (big.edge_count <= 6000 and len(g.nodes) <= 8 and detect_ms < 200
          and same_topology and t2 / t1 <= bound)
    record(10, "efficiency", ok,
           f"512x512 with {big.edge_count} px, {len(g.nodes)} nodes: median detect "
           f"{detect_ms:.1f} ms (< 200); explore ratio {t2 / t1:.2f} for N {n1}->{n2} "
           f"(<= {bound:.2f})")

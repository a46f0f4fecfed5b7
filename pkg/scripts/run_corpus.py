#!/usr/bin/env python3
"""Recall and false-positive sweep over seeded synthetic corpora.

    python scripts/run_corpus.py --images 100 --integer
    python scripts/run_corpus.py --tol-abs 1.0 --csv sweep.csv
"""

import argparse
import csv
import math
import sys
import time

import numpy as np

from antcircles.circlefit import FitConfig
from antcircles.pipeline import DetectConfig, detect
from antcircles.synth import random_composition, random_non_circle


def matched(hits, circle, tol=2.0) -> bool:
    cx, cy, r = circle
    return any(math.hypot(h.cx - cx, h.cy - cy) <= tol and abs(h.r - r) <= tol for h in hits)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--images", type=int, default=100)
    ap.add_argument("--base-seed", type=int, default=2000)
    ap.add_argument("--integer", action="store_true",
                    help="round centers and radii to whole pixels")
    ap.add_argument("--lines", type=int, default=0, help="max line distractors per image")
    ap.add_argument("--tol-abs", type=float, default=1.5)
    ap.add_argument("--tol-rel", type=float, default=0.04)
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--csv", help="per-image rows written here")
    args = ap.parse_args(argv)

    config = DetectConfig(fit=FitConfig(tol_abs=args.tol_abs, tol_rel=args.tol_rel,
                                        trials=args.trials))
    rows = []
    total = found = spurious = 0
    t0 = time.perf_counter()
    for i in range(args.images):
        seed = args.base_seed + i
        edges, truth = random_composition(np.random.default_rng(seed), integer=args.integer,
                                          n_lines=(0, args.lines))
        report = detect(edges, config)
        hit_count = sum(matched(report.hits, c) for c in truth.circles)
        extra = sum(not any(math.hypot(h.cx - c[0], h.cy - c[1]) <= 2 and abs(h.r - c[2]) <= 2
                            for c in truth.circles) for h in report.hits)
        total += len(truth.circles)
        found += hit_count
        spurious += extra
        rows.append(dict(seed=seed, circles=len(truth.circles), found=hit_count, extra=extra,
                         cycles=report.cycles, truncated=report.truncated))
        if hit_count < len(truth.circles):
            print(f"seed {seed}: {hit_count}/{len(truth.circles)} found, cycles={report.cycles}",
                  file=sys.stderr)
    elapsed = time.perf_counter() - t0

    fp_images = 0
    for i in range(args.images):
        edges, _ = random_non_circle(np.random.default_rng(args.base_seed + 10_000 + i))
        fp_images += bool(detect(edges, config).hits)

    print(f"recall        {found}/{total} = {found / max(total, 1):.1%}")
    print(f"unmatched hits {spurious}")
    print(f"non-circle images with a hit {fp_images}/{args.images}")
    print(f"max cycles    {max(r['cycles'] for r in rows)}"
          f" ({sum(r['truncated'] for r in rows)} truncated)")
    print(f"detect time   {elapsed:.2f} s")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())

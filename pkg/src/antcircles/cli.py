"""Command line: ``antcircles detect`` and ``antcircles synth``."""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .circlefit import FitConfig
from .graph import CycleLimits
from .imageio import (
    GroundTruth, ImageFormatError, load_edge_map, render_overlay, save_edge_map,
)
from .pipeline import DetectConfig, DetectReport, detect
from .synth import draw, random_composition, regular_polygon, square

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_FORMAT = 0, 2, 3, 4

CSV_FIELDS = ("cx", "cy", "r", "loop_length", "max_deviation")


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antcircles", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect circles in edge images")
    d.add_argument("inputs", nargs="+", help="PGM (P2/P5) or 8-bit grayscale PNG files")
    d.add_argument("--threshold", type=int, default=128)
    d.add_argument("--invert", action="store_true")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--tol-abs", type=float, default=1.5)
    d.add_argument("--tol-rel", type=float, default=0.04)
    d.add_argument("--min-radius", type=float, default=5.0)
    d.add_argument("--min-loop-length", type=int, default=20)
    d.add_argument("--trials", type=int, default=3)
    d.add_argument("--max-cycles", type=int, default=10_000)
    d.add_argument("--max-cycle-branches", type=int, default=32)
    d.add_argument("--random-start", action="store_true",
                   help="seed mother ants at shuffled pixels instead of raster order")
    d.add_argument("--overlay", help="write an overlay image (single input only)")
    d.add_argument("--format", choices=("json", "csv"), default="json")
    d.add_argument("-o", "--output", help="write the report here instead of stdout")
    d.add_argument("--graph-json", help="also dump the pixel graph (single input only)")
    d.add_argument("--no-timing", action="store_true",
                   help="zero the stage timings so reports are byte-reproducible")
    d.add_argument("--jobs", type=_positive_int, default=1)
    d.add_argument("--trace", action="store_true", help="log every ant step to stderr")

    s = sub.add_parser("synth", help="write a synthetic edge image and its ground truth")
    s.add_argument("output", help="image path (.pgm or .png)")
    s.add_argument("--width", type=_positive_int, default=256)
    s.add_argument("--height", type=_positive_int, default=256)
    s.add_argument("--circle", nargs=3, type=float, action="append", default=[],
                   metavar=("CX", "CY", "R"))
    s.add_argument("--ellipse", nargs=4, type=float, action="append", default=[],
                   metavar=("CX", "CY", "A", "B"))
    s.add_argument("--square", nargs=3, type=float, action="append", default=[],
                   metavar=("CX", "CY", "SIDE"))
    s.add_argument("--triangle", nargs=3, type=float, action="append", default=[],
                   metavar=("CX", "CY", "RADIUS"))
    s.add_argument("--line", nargs=4, type=int, action="append", default=[],
                   metavar=("X0", "Y0", "X1", "Y1"))
    s.add_argument("--random", type=int, metavar="MAX_CIRCLES",
                   help="add 1..MAX_CIRCLES random circles drawn from --seed")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sidecar", help="ground-truth JSON path (default: output with .json)")
    return parser


def config_from_args(args) -> DetectConfig:
    try:
        return DetectConfig(
            fit=FitConfig(
                tol_abs=args.tol_abs, tol_rel=args.tol_rel, min_radius=args.min_radius,
                min_loop_length=args.min_loop_length, trials=args.trials, seed=args.seed,
            ),
            limits=CycleLimits(args.max_cycles, args.max_cycle_branches),
            random_start=args.random_start,
            threshold=args.threshold,
            invert=args.invert,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def format_csv(report: DetectReport) -> str:
    buf = io.StringIO()
    for h in report.hits:
        row = h.to_json()
        buf.write(",".join(repr(row[k]) if isinstance(row[k], float) else str(row[k])
                           for k in CSV_FIELDS) + "\n")
    return buf.getvalue()


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_detect(args) -> int:
    if not 0 <= args.threshold <= 255:
        raise UsageError("--threshold must be within 0..255")
    if len(args.inputs) > 1 and (args.overlay or args.graph_json):
        raise UsageError("--overlay and --graph-json need a single input")
    config = config_from_args(args)
    if args.trace:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr, format="%(message)s")

    edge_maps = [load_edge_map(p, args.threshold, args.invert) for p in args.inputs]
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        reports = list(pool.map(lambda m: detect(m, config), edge_maps))

    if args.overlay:
        render_overlay(edge_maps[0], reports[0].hits, args.overlay)
    if args.graph_json:
        Path(args.graph_json).write_text(json.dumps(reports[0].graph.to_json(), indent=2) + "\n")

    if args.format == "csv":
        text = "".join(format_csv(r) for r in reports)
    else:
        docs = [r.to_json(timing=not args.no_timing) for r in reports]
        if len(docs) > 1:
            for doc, path in zip(docs, args.inputs):
                doc["input"] = str(path)
        text = json.dumps(docs[0] if len(docs) == 1 else docs, indent=2) + "\n"
    _write_text(args.output, text)
    return EXIT_OK


def cmd_synth(args) -> int:
    truth = GroundTruth()
    for cx, cy, r in args.circle:
        if r < 1:
            raise UsageError(f"circle radius must be >= 1, got {r}")
        truth.circles.append((cx, cy, r))
    for cx, cy, a, b in args.ellipse:
        truth.distractors.append({"kind": "ellipse", "cx": cx, "cy": cy, "a": a, "b": b})
    for cx, cy, side in args.square:
        truth.distractors.append({"kind": "polygon", "shape": "square",
                                  "vertices": [list(v) for v in square(cx, cy, side)]})
    for cx, cy, rad in args.triangle:
        truth.distractors.append({"kind": "polygon", "shape": "triangle",
                                  "vertices": [list(v) for v in regular_polygon(cx, cy, rad, 3)]})
    for x0, y0, x1, y1 in args.line:
        truth.distractors.append({"kind": "line", "p0": [x0, y0], "p1": [x1, y1]})
    if args.random:
        size = min(args.width, args.height)
        _, extra = random_composition(np.random.default_rng(args.seed), size=size,
                                      n_circles=(1, args.random), integer=False)
        truth.circles.extend(extra.circles)
    if not truth.circles and not truth.distractors:
        raise UsageError("nothing to draw: give at least one shape or --random")
    try:
        edges = draw(truth, args.width, args.height)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    out = Path(args.output)
    sidecar = Path(args.sidecar) if args.sidecar else out.with_suffix(".json")
    save_edge_map(edges, out)
    sidecar.write_text(json.dumps(truth.to_json(), indent=2) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on malformed arguments
    handler = cmd_detect if args.command == "detect" else cmd_synth
    try:
        return handler(args)
    except UsageError as exc:
        print(f"antcircles: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImageFormatError as exc:
        print(f"antcircles: unsupported image: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"antcircles: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

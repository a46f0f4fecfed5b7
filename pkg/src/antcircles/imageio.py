"""Edge-map ingestion, PGM/PNG I/O, rasterizers and overlays."""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Pixel = tuple[int, int]

# Clockwise from north; (dx, dy) with y growing downwards.
NEIGHBOR_OFFSETS: tuple[Pixel, ...] = (
    (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1),
)

DEFAULT_THRESHOLD = 128
EDGE_INTENSITY = 255
OVERLAY_INTENSITY = 200


class ImageFormatError(ValueError):
    """Raised for files that are readable but not a supported image."""


@dataclass(frozen=True)
class EdgeMap:
    """Binary raster of edge pixels, stored row-major as ``pixels[y, x]``."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"edge map must be a non-empty 2-D grid, got shape {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def empty(cls, width: int, height: int) -> "EdgeMap":
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def from_points(cls, width: int, height: int, points: Iterable[Pixel]) -> "EdgeMap":
        arr = np.zeros((height, width), dtype=bool)
        for x, y in points:
            if 0 <= x < width and 0 <= y < height:
                arr[y, x] = True
        return cls(arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.pixels.sum())

    def __contains__(self, p: Pixel) -> bool:
        x, y = p
        return 0 <= x < self.width and 0 <= y < self.height and bool(self.pixels[y, x])

    def points(self) -> list[Pixel]:
        """Edge pixels as ``(x, y)`` in raster order."""
        ys, xs = np.nonzero(self.pixels)
        return list(zip(xs.tolist(), ys.tolist()))

    def union(self, other: "EdgeMap") -> "EdgeMap":
        if self.pixels.shape != other.pixels.shape:
            raise ValueError("edge maps differ in size")
        return EdgeMap(self.pixels | other.pixels)

    def __eq__(self, other):
        return isinstance(other, EdgeMap) and np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))


@dataclass
class GroundTruth:
    """Shapes drawn into a synthetic image.

    ``circles`` holds ``(cx, cy, r)`` triples; ``distractors`` holds dicts such
    as ``{"kind": "ellipse", "cx": .., "cy": .., "a": .., "b": ..}`` or
    ``{"kind": "polygon", "vertices": [[x, y], ...]}``.
    """

    circles: list[tuple[float, float, float]] = field(default_factory=list)
    distractors: list[dict] = field(default_factory=list)

    def __post_init__(self):
        for c in self.circles:
            if c[2] < 1:
                raise ValueError(f"ground-truth circle radius must be >= 1, got {c[2]}")

    def to_json(self) -> dict:
        return {
            "circles": [{"cx": cx, "cy": cy, "r": r} for cx, cy, r in self.circles],
            "distractors": list(self.distractors),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GroundTruth":
        return cls(
            circles=[(c["cx"], c["cy"], c["r"]) for c in data.get("circles", [])],
            distractors=list(data.get("distractors", [])),
        )


# --------------------------------------------------------------------------
# Reading and writing

_PNM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _pnm_header(data: bytes) -> tuple[bytes, int, int, int, int]:
    """Parse magic, width, height, maxval; return them and the raster offset."""
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PNM_TOKEN.match(data, pos)
        if m is None:
            raise ImageFormatError("truncated PNM header")
        tokens.append(m.group(1))
        pos = m.end()
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError("malformed PNM header") from exc
    return magic, width, height, maxval, pos


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    """Read a P2 or P5 PGM (maxval <= 255) into a ``uint8`` array ``[y, x]``."""
    data = Path(path).read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise ImageFormatError(f"{path}: not a P2/P5 PGM file")
    magic, width, height, maxval, pos = _pnm_header(data)
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"{path}: zero-sized image")
    if not 0 < maxval <= 255:
        raise ImageFormatError(f"{path}: unsupported maxval {maxval}")
    n = width * height
    if magic == b"P5":
        raster = data[pos + 1 : pos + 1 + n]  # single whitespace byte after maxval
        if len(raster) != n:
            raise ImageFormatError(f"{path}: truncated P5 raster")
        values = np.frombuffer(raster, dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:])
        try:
            values = np.array(body.split()[:n], dtype=np.int64)
        except ValueError as exc:
            raise ImageFormatError(f"{path}: non-numeric P2 sample") from exc
        if values.size != n:
            raise ImageFormatError(f"{path}: truncated P2 raster")
        if values.min(initial=0) < 0 or values.max(initial=0) > maxval:
            raise ImageFormatError(f"{path}: sample out of range")
    values = values.reshape(height, width)
    if maxval != 255:
        values = np.round(values.astype(np.float64) * 255.0 / maxval)
    return values.astype(np.uint8)


def write_pgm(path: str | os.PathLike, image: np.ndarray, binary: bool = True) -> None:
    img = np.asarray(image, dtype=np.uint8)
    height, width = img.shape
    if binary:
        payload = b"P5\n%d %d\n255\n" % (width, height) + img.tobytes()
    else:
        lines = [" ".join(str(v) for v in row) for row in img.tolist()]
        payload = ("P2\n%d %d\n255\n" % (width, height) + "\n".join(lines) + "\n").encode()
    Path(path).write_bytes(payload)


def _read_png(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        if im.mode not in ("L", "1"):
            raise ImageFormatError(f"{path}: PNG must be 8-bit grayscale, got mode {im.mode}")
        arr = np.asarray(im.convert("L"), dtype=np.uint8)
    if arr.size == 0:
        raise ImageFormatError(f"{path}: zero-sized image")
    return arr


def _write_png(path, image: np.ndarray) -> None:
    from PIL import Image

    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="L").save(path, format="PNG")


def read_gray(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head[:2] in (b"P2", b"P5"):
        return read_pgm(path)
    if head == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    raise ImageFormatError(f"{path}: unsupported image format")


def write_gray(path: str | os.PathLike, image: np.ndarray) -> None:
    """Write by extension: ``.png`` as PNG, anything else as binary PGM."""
    if str(path).lower().endswith(".png"):
        _write_png(path, image)
    else:
        write_pgm(path, image)


def load_edge_map(path, threshold: int = DEFAULT_THRESHOLD, invert: bool = False) -> EdgeMap:
    """Load a grayscale image; pixels with intensity >= threshold are edges."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be within 0..255, got {threshold}")
    gray = read_gray(path)
    mask = gray >= threshold
    return EdgeMap(~mask if invert else mask)


def edge_image(edges: EdgeMap, intensity: int = EDGE_INTENSITY) -> np.ndarray:
    return np.where(edges.pixels, np.uint8(intensity), np.uint8(0)).astype(np.uint8)


def save_edge_map(edges: EdgeMap, path) -> None:
    write_gray(path, edge_image(edges))


def render_overlay(base: EdgeMap, hits: Sequence, path, intensity: int = OVERLAY_INTENSITY,
                   edge_intensity: int = EDGE_INTENSITY) -> np.ndarray:
    """Write ``base`` with each hit's loop pixels recolored; returns the image.

    Hits without loop pixels get their fitted circle rasterized instead.
    Anything outside the canvas is clipped.
    """
    img = edge_image(base, edge_intensity)
    h, w = img.shape
    for hit in hits:
        pts = getattr(hit, "loop", None)
        if not pts:
            pts = circle_points(hit.cx, hit.cy, hit.r)
        for x, y in pts:
            if 0 <= x < w and 0 <= y < h:
                img[y, x] = intensity
    write_gray(path, img)
    return img


# --------------------------------------------------------------------------
# Rasterization

def _round(v: float) -> int:
    return math.floor(v + 0.5)


def _adjacent(a: Pixel, b: Pixel) -> bool:
    return a != b and abs(a[0] - b[0]) <= 1 and abs(a[1] - b[1]) <= 1


def thin_closed_chain(chain: list[Pixel]) -> list[Pixel]:
    """Drop pixels whose cyclic predecessor and successor already touch."""
    pts = list(chain)
    changed = True
    while changed and len(pts) > 4:
        changed = False
        i = 0
        while i < len(pts) and len(pts) > 4:
            if _adjacent(pts[i - 1], pts[(i + 1) % len(pts)]):
                del pts[i]
                changed = True
            else:
                i += 1
    return pts


def _order_by_angle(points: Iterable[Pixel], cx: float, cy: float) -> list[Pixel]:
    return sorted(set(points), key=lambda p: (math.atan2(p[1] - cy, p[0] - cx), p))


def _bridge_gaps(chain: list[Pixel], project) -> list[Pixel]:
    out: list[Pixel] = []
    n = len(chain)
    for i, p in enumerate(chain):
        out.append(p)
        q = chain[(i + 1) % n]
        while not _adjacent(out[-1], q) and out[-1] != q:
            a = out[-1]
            step = (a[0] + (q[0] > a[0]) - (q[0] < a[0]), a[1] + (q[1] > a[1]) - (q[1] < a[1]))
            cand = project(step)
            out.append(cand if _adjacent(out[-1], cand) else step)
    return out


def circle_points(cx: float, cy: float, r: float) -> list[Pixel]:
    """Midpoint-circle pixels of an arbitrary (possibly subpixel) circle.

    Each column in the top/bottom octants gets the nearest row, each row in the
    side octants the nearest column. For an integer center and radius this is
    exactly the classic midpoint set. The chain is then ordered by angle and
    thinned so every pixel has exactly two 8-neighbors (r >= 2).
    """
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    pts: set[Pixel] = set()
    rr = r * r
    for ix in range(math.floor(cx - r), math.ceil(cx + r) + 1):
        dx = ix - cx
        if dx * dx > rr:
            continue
        h = math.sqrt(rr - dx * dx)
        for y in (_round(cy + h), _round(cy - h)):
            if abs(dx) <= abs(y - cy):
                pts.add((ix, y))
    for iy in range(math.floor(cy - r), math.ceil(cy + r) + 1):
        dy = iy - cy
        if dy * dy > rr:
            continue
        h = math.sqrt(rr - dy * dy)
        for x in (_round(cx + h), _round(cx - h)):
            if abs(dy) <= abs(x - cx):
                pts.add((x, iy))

    def project(p: Pixel) -> Pixel:
        ang = math.atan2(p[1] - cy, p[0] - cx)
        return (_round(cx + r * math.cos(ang)), _round(cy + r * math.sin(ang)))

    chain = _order_by_angle(pts, cx, cy)
    chain = _bridge_gaps(chain, project)
    return thin_closed_chain(chain)


def ellipse_points(cx: float, cy: float, a: float, b: float) -> list[Pixel]:
    """Axis-aligned ellipse with semi-axes ``a`` (x) and ``b`` (y), thinned."""
    if a < 1 or b < 1:
        raise ValueError("ellipse semi-axes must be >= 1")
    n = max(16, int(math.ceil(4 * math.pi * max(a, b))))  # < 0.5 px per sample
    chain: list[Pixel] = []
    for k in range(n):
        t = 2 * math.pi * k / n
        p = (_round(cx + a * math.cos(t)), _round(cy + b * math.sin(t)))
        if not chain or chain[-1] != p:
            chain.append(p)
    while len(chain) > 1 and chain[-1] == chain[0]:
        chain.pop()
    return thin_closed_chain(_dedupe_chain(chain))


def _dedupe_chain(chain: list[Pixel]) -> list[Pixel]:
    seen: set[Pixel] = set()
    out = []
    for p in chain:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def line_points(x0: int, y0: int, x1: int, y1: int) -> list[Pixel]:
    """Bresenham segment, endpoints included."""
    x0, y0, x1, y1 = _round(x0), _round(y0), _round(x1), _round(y1)
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = []
    while True:
        out.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return out
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def polygon_points(vertices: Sequence[tuple[float, float]]) -> list[Pixel]:
    """Closed polygon outline from Bresenham edges, thinned at the corners."""
    chain: list[Pixel] = []
    verts = [(_round(x), _round(y)) for x, y in vertices]
    for i, v in enumerate(verts):
        w = verts[(i + 1) % len(verts)]
        chain.extend(line_points(*v, *w)[:-1])
    return thin_closed_chain(_dedupe_chain(chain))


def _stamp(canvas: EdgeMap, pts: Iterable[Pixel], what: str) -> EdgeMap:
    arr = canvas.pixels.copy()
    h, w = arr.shape
    hit = False
    for x, y in pts:
        if 0 <= x < w and 0 <= y < h:
            arr[y, x] = True
            hit = True
    if not hit:
        raise ValueError(f"{what} lies entirely outside the {w}x{h} canvas")
    return EdgeMap(arr)


def rasterize_circle(cx: float, cy: float, r: float, canvas: EdgeMap) -> EdgeMap:
    return _stamp(canvas, circle_points(cx, cy, r), f"circle ({cx}, {cy}, r={r})")


def rasterize_ellipse(cx: float, cy: float, a: float, b: float, canvas: EdgeMap) -> EdgeMap:
    return _stamp(canvas, ellipse_points(cx, cy, a, b), "ellipse")


def rasterize_polygon(vertices, canvas: EdgeMap) -> EdgeMap:
    return _stamp(canvas, polygon_points(vertices), "polygon")


def rasterize_line(x0, y0, x1, y1, canvas: EdgeMap) -> EdgeMap:
    return _stamp(canvas, line_points(x0, y0, x1, y1), "line")

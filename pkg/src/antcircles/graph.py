"""Pixel graph of nodes and branches, simple-cycle enumeration, loop assembly."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .imageio import NEIGHBOR_OFFSETS, Pixel

OPEN = -1  # endpoint marker for a branch that ends at a curve tip


class BranchKind(str, enum.Enum):
    NORMAL = "normal"
    SELF_LOOP = "self_loop"
    OPEN = "open"


@dataclass(frozen=True)
class Node:
    index: int
    pixels: frozenset
    representative: Pixel


@dataclass(frozen=True)
class Branch:
    index: int
    trace: tuple[Pixel, ...]
    endpoints: tuple[int, int]  # (from, to); OPEN for a loose end
    kind: BranchKind

    def __len__(self):
        return len(self.trace)


@dataclass(frozen=True)
class ExplorationStats:
    edge_pixel_count: int = 0
    visit_events: int = 0
    rounds: int = 0
    mother_ants: int = 0
    ants_spawned: int = 0


@dataclass(frozen=True)
class PixelGraph:
    nodes: tuple[Node, ...]
    branches: tuple[Branch, ...]
    incidence: np.ndarray  # int8, shape (len(nodes), len(branches))
    self_loops: dict  # branch index -> node index
    standalone_loops: tuple[tuple[Pixel, ...], ...]
    stats: ExplorationStats = field(default_factory=ExplorationStats)

    @property
    def open_branches(self) -> list[Branch]:
        return [b for b in self.branches if b.kind is BranchKind.OPEN]

    def node_of(self) -> dict[Pixel, int]:
        return {p: n.index for n in self.nodes for p in n.pixels}

    def to_json(self) -> dict:
        """Debug form: node coordinates, branch endpoints and lengths, incidence rows."""
        return {
            "nodes": [
                {"index": n.index, "x": n.representative[0], "y": n.representative[1],
                 "size": len(n.pixels)}
                for n in self.nodes
            ],
            "branches": [
                {"index": b.index, "from": b.endpoints[0], "to": b.endpoints[1],
                 "kind": b.kind.value, "length": len(b.trace)}
                for b in self.branches
            ],
            "incidence": self.incidence.astype(int).tolist(),
            "self_loops": {str(k): v for k, v in sorted(self.self_loops.items())},
            "standalone_loops": [len(loop) for loop in self.standalone_loops],
            "stats": {
                "edge_pixels": self.stats.edge_pixel_count,
                "visit_events": self.stats.visit_events,
                "rounds": self.stats.rounds,
            },
        }


def build_incidence(n_nodes: int, branches) -> np.ndarray:
    """+1 on the origin row and -1 on the destination row of each normal branch."""
    inc = np.zeros((n_nodes, len(branches)), dtype=np.int8)
    for b in branches:
        if b.kind is BranchKind.NORMAL:
            inc[b.endpoints[0], b.index] = 1
            inc[b.endpoints[1], b.index] = -1
    return inc


# --------------------------------------------------------------------------
# Cycles

FORWARD, REVERSE = 1, -1


@dataclass(frozen=True)
class Cycle:
    """Closed walk as ``(branch index, direction)`` steps; direction is +1/-1."""

    steps: tuple[tuple[int, int], ...]

    @property
    def branch_ids(self) -> tuple[int, ...]:
        return tuple(b for b, _ in self.steps)

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class CycleLimits:
    max_cycles: int = 10_000
    max_branches: int = 32

    def __post_init__(self):
        if self.max_cycles < 1 or self.max_branches < 1:
            raise ValueError("cycle limits must be positive")


@dataclass
class CycleResult:
    cycles: list[Cycle]
    truncated: bool = False

    def __iter__(self):
        return iter(self.cycles)

    def __len__(self):
        return len(self.cycles)


def canonical_branch_order(branch_ids: tuple[int, ...]) -> tuple[int, ...]:
    """Rotate so the smallest id leads, then take the lexicographically smaller direction."""
    k = branch_ids.index(min(branch_ids))
    fwd = branch_ids[k:] + branch_ids[:k]
    rev = (fwd[0],) + tuple(reversed(fwd[1:]))
    return min(fwd, rev)


def _orient(graph_ends: dict[int, tuple[int, int]], order: tuple[int, ...]) -> Cycle:
    """Attach directions to a branch order so consecutive steps chain up."""
    if len(order) == 1:
        return Cycle(((order[0], FORWARD),))
    first = graph_ends[order[0]]
    nxt = graph_ends[order[1]]
    # The first branch must end where the second one touches.
    if first[1] in nxt:
        at, steps = first[1], [(order[0], FORWARD)]
    else:
        at, steps = first[0], [(order[0], REVERSE)]
    for b in order[1:]:
        u, v = graph_ends[b]
        if u == at:
            steps.append((b, FORWARD))
            at = v
        else:
            steps.append((b, REVERSE))
            at = u
    return Cycle(tuple(steps))


def enumerate_cycles(graph: PixelGraph, limits: CycleLimits = CycleLimits()) -> CycleResult:
    """All simple cycles of the branch multigraph, deduplicated.

    Depth-first search rooted at each node in ascending order, only visiting
    nodes with a larger index than the root, so every cycle is reached from its
    smallest node. Parallel branches are distinct edges; each self-loop is a
    one-branch cycle. Each undirected cycle is met twice (once per direction)
    and kept once via its canonical branch order.
    """
    ends = {b.index: b.endpoints for b in graph.branches}
    adj: dict[int, list[tuple[int, int]]] = {n.index: [] for n in graph.nodes}
    for b in graph.branches:
        if b.kind is BranchKind.NORMAL:
            u, v = b.endpoints
            adj[u].append((b.index, v))
            adj[v].append((b.index, u))
    for nbrs in adj.values():
        nbrs.sort()

    found: list[Cycle] = []
    seen: set[tuple[int, ...]] = set()
    truncated = False

    def emit(order: tuple[int, ...]) -> bool:
        key = canonical_branch_order(order)
        if key in seen:
            return True
        if len(found) >= limits.max_cycles:
            return False
        seen.add(key)
        found.append(_orient(ends, key))
        return True

    for b in sorted(graph.self_loops):
        if not emit((b,)):
            return CycleResult(found, True)

    for root in sorted(adj):
        # Iterative DFS: stack of (node, iterator position); path of branch ids.
        on_path = {root}
        path_nodes = [root]
        path_branches: list[int] = []
        stack = [0]
        while stack:
            node = path_nodes[-1]
            i = stack[-1]
            if i >= len(adj[node]):
                stack.pop()
                on_path.discard(path_nodes.pop())
                if path_branches:
                    path_branches.pop()
                continue
            stack[-1] = i + 1
            b, other = adj[node][i]
            if path_branches and b == path_branches[-1]:
                continue
            if other == root:
                if not emit(tuple(path_branches) + (b,)):
                    return CycleResult(found, True)
                continue
            if other < root or other in on_path:
                continue
            if len(path_branches) + 1 >= limits.max_branches:
                truncated = True
                continue
            path_branches.append(b)
            path_nodes.append(other)
            on_path.add(other)
            stack.append(0)
    return CycleResult(found, truncated)


# --------------------------------------------------------------------------
# Loop assembly

def _adjacent(a: Pixel, b: Pixel) -> bool:
    return a != b and abs(a[0] - b[0]) <= 1 and abs(a[1] - b[1]) <= 1


def _touching(cluster, p: Pixel) -> list[Pixel]:
    x, y = p
    return [q for q in ((x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS) if q in cluster]


def node_bridge(node: Node, arrive: Pixel, leave: Pixel) -> list[Pixel]:
    """Shortest run of cluster pixels linking the pixel before a node to the one after.

    The representative pixel alone is used whenever it touches both sides.
    """
    rep = node.representative
    if _adjacent(rep, arrive) and _adjacent(rep, leave):
        return [rep]
    starts = sorted(_touching(node.pixels, arrive))
    goals = set(_touching(node.pixels, leave))
    if not starts or not goals:
        return [rep]
    prev: dict[Pixel, Optional[Pixel]] = {s: None for s in starts}
    queue = deque(starts)
    while queue:
        p = queue.popleft()
        if p in goals:
            out = []
            while p is not None:
                out.append(p)
                p = prev[p]
            return out[::-1]
        for q in sorted(_touching(node.pixels, p)):
            if q not in prev:
                prev[q] = p
                queue.append(q)
    return [rep]


def assemble_loop(graph: PixelGraph, cycle: Cycle, bridges: Optional[dict] = None) -> list[Pixel]:
    """Ordered closed pixel loop of a cycle: oriented traces joined through their nodes.

    ``bridges`` may be a dict shared across calls on the same graph to cache
    the node crossings.
    """
    if bridges is None:
        bridges = {}
    traces = []
    joins = []
    for b_id, direction in cycle.steps:
        br = graph.branches[b_id]
        if br.kind is BranchKind.OPEN:
            raise ValueError(f"branch {b_id} is open and cannot be part of a cycle")
        trace = br.trace if direction == FORWARD else br.trace[::-1]
        end = br.endpoints[1] if direction == FORWARD else br.endpoints[0]
        traces.append(trace)
        joins.append(end)
    loop: list[Pixel] = []
    n = len(traces)
    for i, trace in enumerate(traces):
        loop.extend(trace)
        nxt = traces[(i + 1) % n]
        key = (joins[i], trace[-1], nxt[0])
        bridge = bridges.get(key)
        if bridge is None:
            bridge = bridges[key] = node_bridge(graph.nodes[joins[i]], trace[-1], nxt[0])
        loop.extend(bridge)
    return loop

"""Ant-system exploration of an edge map into a node/branch graph.

Ants are one-pixel agents that walk edge pixels one step per round. An ant
that finds two or more ways forward has found a node: it retires, its path
becomes a branch, and a fresh ant is placed on every unexplored pixel leaving
the node. Two ants walking the same branch towards each other meet and their
paths are joined into one branch. Every edge pixel is entered exactly once.

Junction pixels are rarely a single pixel after rasterization, so a node is a
cluster: the pixel where the node was found plus every 8-connected pixel with
three or more edge neighbors (and any stray pixel fully enclosed by the
cluster).
"""

from __future__ import annotations

import enum
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .graph import (
    OPEN, Branch, BranchKind, ExplorationStats, Node, PixelGraph, build_incidence,
)
from .imageio import NEIGHBOR_OFFSETS, EdgeMap, Pixel

log = logging.getLogger(__name__)


class StepKind(enum.Enum):
    MOVED = "moved"
    REACHED_NODE = "reached_node"
    MET_ANT = "met_ant"
    DEAD_END = "dead_end"
    WAITED = "waited"  # next pixel holds an ant that is itself about to hit a node


@dataclass(frozen=True)
class StepOutcome:
    kind: StepKind
    node: Optional[int] = None
    other: Optional[int] = None


class MotherKind(enum.Enum):
    CLOSED_LOOP = "closed_loop"
    NODE_FOUND = "node_found"
    DEAD_END = "dead_end"


@dataclass(frozen=True)
class MotherOutcome:
    kind: MotherKind
    loop: tuple = ()
    node: Optional[int] = None
    path_length: int = 0


@dataclass
class Ant:
    id: int
    pos: Pixel
    origin: int  # raw node id, or OPEN
    path: list = field(default_factory=list)
    prev: Optional[Pixel] = None
    fresh: bool = False  # placed next to its origin node and not moved yet


class Explorer:
    """Mutable exploration state for one edge map.

    ``explore()`` is the usual entry point; the step-level methods are public so
    tests can drive single ants.
    """

    def __init__(self, edges: EdgeMap):
        self.edges = edges
        self._raster: list[Pixel] = edges.points()
        self.edge_set: set[Pixel] = set(self._raster)
        self.visited: set[Pixel] = set()
        self.occupied: dict[Pixel, int] = {}
        self.ants: dict[int, Ant] = {}
        self.cluster_of: dict[Pixel, int] = {}
        self.node_pixels: list[list[Pixel]] = []
        self._parent: list[int] = []
        self.branches: list[tuple[list, int, int]] = []  # (trace, from, to), raw ids
        self.standalone: list[tuple] = []
        self.visit_events = 0
        self.rounds = 0
        self.mother_ants = 0
        self.ants_spawned = 0
        self._next_ant = 0
        self._nbr_cache: dict[Pixel, list[Pixel]] = {}

    # -- pixel helpers -------------------------------------------------------

    def neighbors(self, p: Pixel) -> list[Pixel]:
        """Edge 8-neighbors, clockwise from north."""
        out = self._nbr_cache.get(p)
        if out is None:
            x, y = p
            es = self.edge_set
            out = [(x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS if (x + dx, y + dy) in es]
            self._nbr_cache[p] = out
        return out

    def is_junction(self, p: Pixel) -> bool:
        return len(self.neighbors(p)) >= 3

    def _visit(self, p: Pixel) -> None:
        if p in self.visited:
            raise RuntimeError(f"pixel {p} visited twice")
        self.visited.add(p)
        self.visit_events += 1

    def count_directions(self, pos: Pixel, prev: Optional[Pixel] = None) -> list[Pixel]:
        """Unvisited or ant-occupied edge neighbors of ``pos``, excluding ``prev``."""
        visited, occupied = self.visited, self.occupied
        return [
            q for q in self.neighbors(pos)
            if q != prev and (q not in visited or q in occupied)
        ]

    # -- node clusters -------------------------------------------------------

    def find(self, n: int) -> int:
        parent = self._parent
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    def _union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            lo, hi = min(ra, rb), max(ra, rb)
            self._parent[hi] = lo
            return lo
        return ra

    def _new_node(self) -> int:
        n = len(self._parent)
        self._parent.append(n)
        self.node_pixels.append([])
        return n

    def _add_to_cluster(self, node: int, p: Pixel) -> None:
        self.cluster_of[p] = node
        self.node_pixels[node].append(p)

    def _contacts(self, ant: Ant) -> list[int]:
        """Nodes whose cluster touches the ant, other than the one it just left."""
        out = set()
        origin = self.find(ant.origin) if ant.fresh else None
        for q in self.neighbors(ant.pos):
            if q == ant.prev:
                continue
            n = self.cluster_of.get(q)
            if n is None:
                continue
            n = self.find(n)
            if n != origin:
                out.add(n)
        return sorted(out)

    def _grow_and_spawn(self, node: int, seeds: list[Pixel]) -> int:
        """Absorb junction pixels around ``seeds`` into ``node``, then spawn ants."""
        new = list(seeds)
        queue = deque(seeds)
        while queue:
            c = queue.popleft()
            for q in self.neighbors(c):
                other = self.cluster_of.get(q)
                if other is not None:
                    node = self._union(node, other)
                elif q not in self.visited and self.is_junction(q):
                    self._visit(q)
                    self._add_to_cluster(node, q)
                    new.append(q)
                    queue.append(q)
        # Stray pixels whose every neighbor is already a node pixel.
        changed = True
        while changed:
            changed = False
            for c in list(new):
                for q in self.neighbors(c):
                    if q in self.visited:
                        continue
                    nbr_nodes = [self.cluster_of.get(n) for n in self.neighbors(q)]
                    if all(n is not None for n in nbr_nodes):
                        for n in nbr_nodes:
                            node = self._union(node, n)
                        self._visit(q)
                        self._add_to_cluster(node, q)
                        new.append(q)
                        changed = True
        for c in new:
            for q in self.neighbors(c):
                if q not in self.visited:
                    self._visit(q)
                    self._spawn(q, origin=node, prev=c, fresh=True)
        return self.find(node)

    def _spawn(self, pos: Pixel, origin: int, prev: Optional[Pixel], fresh: bool,
               path: Optional[list] = None) -> Ant:
        ant = Ant(self._next_ant, pos, origin, list(path or []), prev, fresh)
        self._next_ant += 1
        self.ants[ant.id] = ant
        self.occupied[pos] = ant.id
        self.ants_spawned += 1
        return ant

    def _retire(self, ant: Ant) -> None:
        del self.ants[ant.id]
        del self.occupied[ant.pos]

    def place_ant(self, pos: Pixel, origin: int = OPEN, path=(), prev: Optional[Pixel] = None) -> int:
        """Drop an ant by hand (for driving single steps); marks its pixels visited."""
        for p in list(path) + [pos]:
            self._visit(p)
        if prev is None and path:
            prev = path[-1]
        return self._spawn(pos, origin, prev, fresh=False, path=list(path)).id

    def new_node(self, pixels=()) -> int:
        node = self._new_node()
        for p in pixels:
            self._visit(p)
            self._add_to_cluster(node, p)
        return node

    def _record_branch(self, trace: list, start: int, end: int) -> int:
        self.branches.append((trace, start, end))
        return len(self.branches) - 1

    # -- ant events ----------------------------------------------------------

    def handle_node(self, ant_id: int, node_pixel: Pixel) -> int:
        """Retire the ant at ``node_pixel``, which joins (or founds) a node cluster."""
        ant = self.ants[ant_id]
        self._retire(ant)
        touching = sorted({self.find(self.cluster_of[q]) for q in self.neighbors(node_pixel)
                           if q in self.cluster_of})
        node = touching[0] if touching else self._new_node()
        for other in touching[1:]:
            node = self._union(node, other)
        self._add_to_cluster(node, node_pixel)
        if ant.path:
            self._record_branch(ant.path, ant.origin, node)
        return self._grow_and_spawn(node, [node_pixel])

    def handle_meet(self, ant_a: int, ant_b: int) -> int:
        """Join the paths of two adjacent ants back to back into one branch."""
        a, b = self.ants[ant_a], self.ants[ant_b]
        if not (abs(a.pos[0] - b.pos[0]) <= 1 and abs(a.pos[1] - b.pos[1]) <= 1) or a.pos == b.pos:
            raise ValueError(f"ants {ant_a} and {ant_b} are not adjacent")
        trace = a.path + [a.pos, b.pos] + b.path[::-1]
        self._retire(a)
        self._retire(b)
        return self._record_branch(trace, a.origin, b.origin)

    def _arrive(self, ant: Ant, node: int) -> int:
        self._retire(ant)
        return self._record_branch(ant.path + [ant.pos], ant.origin, node)

    def _dead_end(self, ant: Ant) -> int:
        self._retire(ant)
        return self._record_branch(ant.path + [ant.pos], ant.origin, OPEN)

    def step_ant(self, ant_id: int) -> StepOutcome:
        try:
            ant = self.ants[ant_id]
        except KeyError:
            raise KeyError(f"no active ant with id {ant_id}") from None
        pos = ant.pos
        ways = self.count_directions(pos, ant.prev)
        if len(ways) >= 2:
            out = StepOutcome(StepKind.REACHED_NODE, node=self.handle_node(ant_id, pos))
        else:
            contacts = self._contacts(ant)
            if contacts and self.is_junction(pos):
                out = StepOutcome(StepKind.REACHED_NODE, node=self.handle_node(ant_id, pos))
            elif contacts:
                self._arrive(ant, contacts[0])
                out = StepOutcome(StepKind.REACHED_NODE, node=self.find(contacts[0]))
            elif ways:
                nxt = ways[0]
                other_id = self.occupied.get(nxt)
                if other_id is None:
                    ant.path.append(pos)
                    ant.prev = pos
                    ant.pos = nxt
                    ant.fresh = False
                    del self.occupied[pos]
                    self.occupied[nxt] = ant_id
                    self._visit(nxt)
                    out = StepOutcome(StepKind.MOVED)
                else:
                    other = self.ants[other_id]
                    if self.count_directions(other.pos, other.prev) == [pos]:
                        self.handle_meet(ant_id, other_id)
                        out = StepOutcome(StepKind.MET_ANT, other=other_id)
                    else:
                        out = StepOutcome(StepKind.WAITED, other=other_id)
            else:
                self._dead_end(ant)
                out = StepOutcome(StepKind.DEAD_END)
        log.debug("ant %d at %s: %s", ant_id, pos, out)
        return out

    # -- mother ant ----------------------------------------------------------

    def run_mother_ant(self, start: Pixel) -> MotherOutcome:
        """Walk a fresh component from ``start`` until a node, a dead end or closure.

        When the start pixel has a second way out, whatever stopped the mother
        hands her path to a replacement ant standing on ``start`` and facing
        the untried side, so the rest of the curve is still walked.
        """
        if start not in self.edge_set:
            raise ValueError(f"{start} is not an edge pixel")
        self.mother_ants += 1
        self._visit(start)
        if self.is_junction(start):
            node = self._new_node()
            self._add_to_cluster(node, start)
            node = self._grow_and_spawn(node, [start])
            return MotherOutcome(MotherKind.NODE_FOUND, node=node, path_length=0)
        ways = self.count_directions(start)
        if not ways:
            self._record_branch([start], OPEN, OPEN)
            return MotherOutcome(MotherKind.DEAD_END, path_length=1)
        tail = ways[1] if len(ways) > 1 else None
        path = [start]
        prev, pos = start, ways[0]
        self._visit(pos)
        while True:
            ways = self.count_directions(pos, prev)
            if len(ways) >= 2:
                node = self._new_node()
                self._add_to_cluster(node, pos)
                if tail is None:
                    self._record_branch(path, OPEN, node)
                else:
                    back = path[1:][::-1]
                    self._spawn(start, origin=node, prev=back[-1] if back else pos,
                                fresh=not back, path=back)
                node = self._grow_and_spawn(node, [pos])
                return MotherOutcome(MotherKind.NODE_FOUND, node=node, path_length=len(path))
            if ways:
                path.append(pos)
                prev, pos = pos, ways[0]
                self._visit(pos)
                continue
            if pos == tail:
                loop = tuple(path + [pos])
                self.standalone.append(loop)
                return MotherOutcome(MotherKind.CLOSED_LOOP, loop=loop, path_length=len(loop))
            if tail is None:
                self._record_branch(path + [pos], OPEN, OPEN)
            else:
                back = [pos] + path[1:][::-1]
                self._spawn(start, origin=OPEN, prev=back[-1], fresh=False, path=back)
            return MotherOutcome(MotherKind.DEAD_END, path_length=len(path) + 1)

    # -- driver --------------------------------------------------------------

    def run_round(self) -> list[tuple[int, StepOutcome]]:
        self.rounds += 1
        out = []
        for ant_id in sorted(self.ants):
            if ant_id in self.ants:
                out.append((ant_id, self.step_ant(ant_id)))
        return out

    def explore(self, seed: Optional[int] = None) -> PixelGraph:
        starts = list(self._raster)
        if seed is not None:
            random.Random(seed).shuffle(starts)
        for start in starts:
            if start in self.visited:
                continue
            self.run_mother_ant(start)
            while self.ants:
                self.run_round()
        return self.graph()

    def graph(self) -> PixelGraph:
        """Freeze the current state: merge clusters, renumber nodes, build incidence."""
        index: dict[int, int] = {}
        for raw in range(len(self._parent)):
            root = self.find(raw)
            if root not in index:
                index[root] = len(index)
        members: list[list[Pixel]] = [[] for _ in index]
        for raw, pixels in enumerate(self.node_pixels):
            members[index[self.find(raw)]].extend(pixels)
        nodes = tuple(Node(i, frozenset(px), _representative(px)) for i, px in enumerate(members))

        def resolve(n: int) -> int:
            return OPEN if n == OPEN else index[self.find(n)]

        branches = []
        self_loops = {}
        for i, (trace, start, end) in enumerate(self.branches):
            u, v = resolve(start), resolve(end)
            if OPEN in (u, v):
                kind = BranchKind.OPEN
            elif u == v:
                kind = BranchKind.SELF_LOOP
                self_loops[i] = u
            else:
                kind = BranchKind.NORMAL
            branches.append(Branch(i, tuple(trace), (u, v), kind))
        stats = ExplorationStats(
            edge_pixel_count=len(self.edge_set),
            visit_events=self.visit_events,
            rounds=self.rounds,
            mother_ants=self.mother_ants,
            ants_spawned=self.ants_spawned,
        )
        return PixelGraph(
            nodes=nodes,
            branches=tuple(branches),
            incidence=build_incidence(len(nodes), branches),
            self_loops=self_loops,
            standalone_loops=tuple(self.standalone),
            stats=stats,
        )


def _representative(pixels: list[Pixel]) -> Pixel:
    """Cluster pixel nearest the centroid (ties broken by row, then column)."""
    n = len(pixels)
    mx = sum(p[0] for p in pixels) / n
    my = sum(p[1] for p in pixels) / n
    return min(pixels, key=lambda p: ((p[0] - mx) ** 2 + (p[1] - my) ** 2, p[1], p[0]))


def explore(edges: EdgeMap, seed: Optional[int] = None) -> PixelGraph:
    """Explore every component of ``edges``.

    Mother ants are seeded in raster order, or in a shuffled order when
    ``seed`` is given.
    """
    return Explorer(edges).explore(seed=seed)

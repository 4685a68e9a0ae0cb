"""Immutable undirected simple graphs and the primitives built on them.

A :class:`GraphSnapshot` is frozen after construction: deletion and
induced-subgraph operations return fresh snapshots, so pipelines can fork
many variants from one base graph and share them freely across workers.
Vertex ids are dense integers ``0..n-1``; vertex sets are plain
``frozenset[int]`` values validated at operation boundaries.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from heapq import heappop, heappush
from pathlib import Path
from typing import Iterable, Iterator

from .errors import GraphFormatError, WitnessValidationError

VertexSet = frozenset[int]
Edge = tuple[int, int]


def canonical_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class GraphSnapshot:
    """Undirected simple graph with sorted per-vertex neighbor lists.

    Invariants: no self-loops, no duplicate edges, adjacency symmetric,
    ``edge_count`` equals half the degree sum.  Use :meth:`from_edges`
    to construct; direct construction skips validation.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int
    label: str = ""

    @staticmethod
    def from_edges(n: int, edges: Iterable[Edge], label: str = "") -> "GraphSnapshot":
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        neighbors: list[set[int]] = [set() for _ in range(n)]
        count = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if v in neighbors[u]:
                raise ValueError(f"duplicate edge ({u},{v})")
            neighbors[u].add(v)
            neighbors[v].add(u)
            count += 1
        return GraphSnapshot(
            n=n,
            adjacency=tuple(tuple(sorted(s)) for s in neighbors),
            edge_count=count,
            label=label,
        )

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(row) for row in self.adjacency)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(
            (u, v) for u in range(self.n) for v in self.adjacency[u] if u < v
        )

    def degree(self, v: int) -> int:
        check_vertex(self, v)
        return len(self.adjacency[v])

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.adjacency)

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def edges(self) -> Iterator[Edge]:
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)

    def validate(self) -> None:
        """Assert structural invariants; raises ValueError on violation."""
        degree_sum = 0
        for u, row in enumerate(self.adjacency):
            if list(row) != sorted(set(row)):
                raise ValueError(f"adjacency[{u}] not sorted/deduplicated")
            degree_sum += len(row)
            for v in row:
                if v == u:
                    raise ValueError(f"self-loop at {u}")
                if not 0 <= v < self.n:
                    raise ValueError(f"neighbor {v} of {u} out of range")
                if u not in self.adjacency[v]:
                    raise ValueError(f"asymmetric edge ({u},{v})")
        if degree_sum != 2 * self.edge_count:
            raise ValueError(
                f"edge_count {self.edge_count} != half degree sum {degree_sum / 2}"
            )


def check_vertex(g: GraphSnapshot, v: int) -> None:
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range for graph on {g.n} vertices")


def check_vertex_set(g: GraphSnapshot, X: Iterable[int]) -> frozenset[int]:
    xs = frozenset(X)
    for v in xs:
        check_vertex(g, v)
    return xs


# ---------------------------------------------------------------------------
# witnesses

@dataclass(frozen=True)
class PathWitness:
    """Explicit vertex sequence of a simple path; machine-validated."""

    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        """Number of edges."""
        return len(self.vertices) - 1

    def validate(self, g: GraphSnapshot) -> None:
        vs = self.vertices
        if len(vs) != len(set(vs)):
            raise WitnessValidationError(f"path repeats a vertex: {vs}")
        for v in vs:
            if not 0 <= v < g.n:
                raise WitnessValidationError(f"path vertex {v} out of range")
        for a, b in zip(vs, vs[1:]):
            if not g.has_edge(a, b):
                raise WitnessValidationError(f"path uses non-edge ({a},{b})")


@dataclass(frozen=True)
class CycleWitness:
    """Simple cycle as an ordered vertex sequence; the closing edge
    (last vertex back to first) is implied."""

    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.vertices)

    def validate(self, g: GraphSnapshot) -> None:
        vs = self.vertices
        if len(vs) < 3:
            raise WitnessValidationError(f"cycle shorter than 3: {vs}")
        if len(vs) != len(set(vs)):
            raise WitnessValidationError(f"cycle repeats a vertex: {vs}")
        for v in vs:
            if not 0 <= v < g.n:
                raise WitnessValidationError(f"cycle vertex {v} out of range")
        for a, b in zip(vs, vs[1:] + (vs[0],)):
            if not g.has_edge(a, b):
                raise WitnessValidationError(f"cycle uses non-edge ({a},{b})")


# ---------------------------------------------------------------------------
# neighborhood primitives

def neighbors_of_set(g: GraphSnapshot, X: Iterable[int]) -> VertexSet:
    """All vertices adjacent to at least one vertex of X.

    The result may intersect X: a member of X adjacent into X is in N(X).
    """
    xs = check_vertex_set(g, X)
    out: set[int] = set()
    for v in xs:
        out.update(g.adjacency[v])
    return frozenset(out)


def kth_neighborhood(g: GraphSnapshot, v: int, k: int) -> VertexSet:
    """Vertices at graph distance exactly k from v (level k of BFS)."""
    check_vertex(g, v)
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    levels = bfs_levels(g, v, depth=k)
    return levels[k] if k < len(levels) else frozenset()

def bfs_levels(g: GraphSnapshot, v: int, depth: int | None = None) -> list[VertexSet]:
    """BFS level sets [ {v}, N(v), ... ] up to `depth` (or exhaustion).

    Always returns depth+1 entries when depth is given; deep levels may
    be empty.
    """
    check_vertex(g, v)
    seen = bytearray(g.n)
    seen[v] = 1
    current = [v]
    levels: list[VertexSet] = [frozenset((v,))]
    while current and (depth is None or len(levels) <= depth):
        nxt: list[int] = []
        for u in current:
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = 1
                    nxt.append(w)
        if not nxt and depth is None:
            break
        levels.append(frozenset(nxt))
        current = nxt
    if depth is not None:
        while len(levels) <= depth:
            levels.append(frozenset())
    return levels


def bfs_distances(g: GraphSnapshot, v: int,
                  allowed: Iterable[int] | None = None) -> list[int]:
    """Distance from v to every vertex (-1 if unreachable), optionally
    restricted to an allowed vertex set containing v."""
    check_vertex(g, v)
    permit = None if allowed is None else set(allowed)
    dist = [-1] * g.n
    dist[v] = 0
    q = deque([v])
    while q:
        u = q.popleft()
        for w in g.adjacency[u]:
            if dist[w] < 0 and (permit is None or w in permit):
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def edge_count_between(g: GraphSnapshot, X: Iterable[int], Y: Iterable[int]) -> int:
    """Ordered-pair edge count e(X,Y): pairs (x,y) with x in X, y in Y,
    xy an edge.  Overlapping X,Y double-count internal edges, so
    e(X,X) = 2·e(X)."""
    xs = check_vertex_set(g, X)
    ys = check_vertex_set(g, Y)
    nbr = g.neighbor_sets
    return sum(len(nbr[x] & ys) for x in xs)


def is_bipartite(g: GraphSnapshot) -> tuple[bool, tuple[int, ...] | None]:
    """BFS 2-coloring: (True, colors) if bipartite else (False, None)."""
    colors = [-1] * g.n
    for s in range(g.n):
        if colors[s] >= 0:
            continue
        colors[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in g.adjacency[u]:
                if colors[w] < 0:
                    colors[w] = 1 - colors[u]
                    q.append(w)
                elif colors[w] == colors[u]:
                    return False, None
    return True, tuple(colors)


def is_connected(g: GraphSnapshot) -> bool:
    if g.n <= 1:
        return True
    return bfs_distances(g, 0).count(-1) == 0


# ---------------------------------------------------------------------------
# subgraph operations

def delete_edges(g: GraphSnapshot, h: Iterable[Edge],
                 label: str | None = None) -> GraphSnapshot:
    """New snapshot with the edges of h removed; every edge of h must be
    present in g (prevents silent budget miscounting)."""
    to_drop: set[Edge] = set()
    for u, v in h:
        e = canonical_edge(u, v)
        if not (0 <= e[0] < g.n and 0 <= e[1] < g.n) or not g.has_edge(*e):
            raise ValueError(f"edge ({u},{v}) not present in graph")
        to_drop.add(e)
    remaining = (e for e in g.edges() if e not in to_drop)
    return GraphSnapshot.from_edges(
        g.n, remaining, label=g.label if label is None else label
    )


def induced_subgraph(g: GraphSnapshot,
                     S: Iterable[int]) -> tuple[GraphSnapshot, tuple[int, ...]]:
    """Induced subgraph on S, relabeled 0..|S|-1.

    Returns (subgraph, mapping) where mapping[new_id] = old_id, so
    witnesses found in the subgraph map back to parent ids.
    """
    xs = check_vertex_set(g, S)
    if not xs:
        raise ValueError("induced subgraph of an empty vertex set")
    mapping = tuple(sorted(xs))
    index = {old: new for new, old in enumerate(mapping)}
    edges = [
        (index[u], index[v])
        for u in mapping
        for v in g.adjacency[u]
        if u < v and v in xs
    ]
    return GraphSnapshot.from_edges(len(mapping), edges, label=g.label), mapping


def min_degree_subgraph(g: GraphSnapshot,
                        threshold: float) -> tuple[GraphSnapshot, tuple[int, ...]]:
    """Iteratively peel vertices of degree < threshold until none remain.

    Peeling is in ascending-degree order, ties broken by lowest vertex id.
    Returns (residual graph relabeled 0..k-1, surviving original ids); the
    residual may be empty, which is a valid verdict.  Whenever g has at
    least threshold·n edges the result is nonempty.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    deg = list(g.degrees())
    alive = bytearray([1] * g.n)
    heap: list[tuple[int, int]] = []
    for v in range(g.n):
        if deg[v] < threshold:
            heappush(heap, (deg[v], v))
    while heap:
        d, v = heappop(heap)
        if not alive[v] or deg[v] != d or deg[v] >= threshold:
            continue
        alive[v] = 0
        for w in g.adjacency[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] < threshold:
                    heappush(heap, (deg[w], w))
    survivors = [v for v in range(g.n) if alive[v]]
    if not survivors:
        return GraphSnapshot.from_edges(0, [], label=g.label), ()
    return induced_subgraph(g, survivors)


# ---------------------------------------------------------------------------
# file format: line-oriented edge list with optional JSON metadata sibling

def save_graph(g: GraphSnapshot, path: str | Path,
               metadata: dict | None = None) -> Path:
    """Write `n <count>` header plus one `u v` line per edge (u < v).

    If metadata is given (or the graph has a label) a sibling
    ``<path>.json`` file carries it.
    """
    path = Path(path)
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = dict(metadata or {})
    if g.label and "label" not in meta:
        meta["label"] = g.label
    if meta:
        Path(str(path) + ".json").write_text(
            json.dumps(meta, indent=2) + "\n", encoding="utf-8"
        )
    return path


def load_graph(path: str | Path) -> tuple[GraphSnapshot, dict]:
    """Read the edge-list format; returns (graph, metadata dict)."""
    path = Path(path)
    n: int | None = None
    edges: list[Edge] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if parts[0] != "n" or len(parts) != 2:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected header 'n <count>', got {raw!r}"
                )
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise GraphFormatError(f"{path}:{lineno}: expected 'u v', got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        if u >= v:
            raise GraphFormatError(f"{path}:{lineno}: edges must have u < v")
        edges.append((u, v))
    if n is None:
        raise GraphFormatError(f"{path}: missing 'n <count>' header")
    meta_path = Path(str(path) + ".json")
    metadata: dict = {}
    if meta_path.exists():
        metadata = json.loads(meta_path.read_text(encoding="utf-8"))
    try:
        g = GraphSnapshot.from_edges(n, edges, label=str(metadata.get("label", "")))
    except ValueError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
    return g, metadata

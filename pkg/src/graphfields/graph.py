"""Graphs with Euclidean edges: construction, validation, and structure.

A graph with Euclidean edges is a finite simple connected graph whose edges
carry a positive length and an internal coordinate running from 0 (at the
``u`` endpoint) to ``length`` (at ``v``), so that points in the interior of
an edge are addressable.  Construction additionally enforces *distance
consistency*: every edge must itself be a shortest route between its
endpoints.  On a cycle this is exactly the requirement that no edge exceeds
half the circumference.

Graphs are immutable once built; the editing operations (:func:`split_edge`,
:func:`merge_at_degree_two`) return new graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import (
    DistanceInconsistentError,
    InvalidGraphError,
    MultiEdgeOrLoopError,
    NotConnectedError,
    NotDegreeTwoError,
    OffsetOutOfRangeError,
    UnknownEdgeError,
    UnknownVertexError,
    WouldCreateMultiEdgeOrLoopError,
)

# Absolute tolerance for the distance-consistency check is this factor times
# the largest edge length; the check itself is scale covariant.
DISTANCE_TOL_SCALE = 1e-9


@dataclass(frozen=True)
class Edge:
    """Undirected edge with a positive length; offsets run from u (0) to v."""

    id: str
    u: str
    v: str
    length: float

    def other(self, vertex: str) -> str:
        return self.v if vertex == self.u else self.u


@dataclass(frozen=True)
class GraphPoint:
    """A location on the graph continuum: a vertex or an (edge, offset) pair.

    Canonical points satisfy: either ``vertex`` is set, or ``edge`` and
    ``offset`` are set with the offset strictly inside (0, length).  Offsets
    of exactly 0 or the full edge length normalize to the endpoint vertex,
    so point equality is well defined.
    """

    vertex: str | None = None
    edge: str | None = None
    offset: float | None = None

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None


def vertex_point(label: str) -> GraphPoint:
    return GraphPoint(vertex=str(label))


def edge_point(edge_id: str, offset: float) -> GraphPoint:
    return GraphPoint(edge=str(edge_id), offset=float(offset))


def point_label(p: GraphPoint) -> str:
    """Stable display label: the vertex label, or ``edgeid@offset``."""
    if p.is_vertex:
        return p.vertex
    return f"{p.edge}@{p.offset!r}"


def _coerce_edge(raw, position: int) -> Edge:
    if isinstance(raw, Edge):
        return Edge(str(raw.id), str(raw.u), str(raw.v), float(raw.length))
    if isinstance(raw, dict):
        eid = raw.get("id", f"e{position + 1}")
        try:
            return Edge(str(eid), str(raw["u"]), str(raw["v"]), float(raw["length"]))
        except KeyError as exc:
            raise InvalidGraphError(f"edge record missing field {exc}") from exc
    if isinstance(raw, (tuple, list)):
        if len(raw) == 4:
            eid, u, v, length = raw
        elif len(raw) == 3:
            u, v, length = raw
            eid = f"e{position + 1}"
        else:
            raise InvalidGraphError(
                "edge tuples must be (id, u, v, length) or (u, v, length)"
            )
        return Edge(str(eid), str(u), str(v), float(length))
    raise InvalidGraphError(f"cannot interpret edge record {raw!r}")


class EuclideanGraph:
    """Validated graph with Euclidean edges.

    Use :func:`build_graph` (or the constructor directly): validation runs
    once at construction and covers simplicity, connectivity, and distance
    consistency.  All-pairs shortest-path distances between vertices are
    computed during validation and kept on the instance, which makes later
    point-to-point geodesic queries a matter of endpoint lookups.
    """

    def __init__(self, vertices, edges):
        vlabels = [str(v) for v in vertices]
        if not vlabels:
            raise InvalidGraphError("vertex list must be non-empty")
        if len(set(vlabels)) != len(vlabels):
            raise InvalidGraphError("duplicate vertex labels")
        vset = set(vlabels)

        normalized: list[Edge] = []
        seen_ids: set[str] = set()
        seen_pairs: set[frozenset[str]] = set()
        for k, raw in enumerate(edges):
            e = _coerce_edge(raw, k)
            if e.id in seen_ids:
                raise InvalidGraphError(f"duplicate edge id {e.id!r}")
            for endpoint in (e.u, e.v):
                if endpoint not in vset:
                    raise UnknownVertexError(
                        f"edge {e.id!r} references unknown vertex {endpoint!r}",
                        vertex=endpoint,
                        edge_id=e.id,
                    )
            if e.u == e.v:
                raise MultiEdgeOrLoopError(
                    f"edge {e.id!r} is a loop at {e.u!r}", edge_id=e.id
                )
            pair = frozenset((e.u, e.v))
            if pair in seen_pairs:
                raise MultiEdgeOrLoopError(
                    f"edge {e.id!r} duplicates another edge between "
                    f"{e.u!r} and {e.v!r}",
                    edge_id=e.id,
                )
            if not math.isfinite(e.length) or e.length <= 0.0:
                raise InvalidGraphError(
                    f"edge {e.id!r} must have positive finite length, got {e.length}"
                )
            seen_ids.add(e.id)
            seen_pairs.add(pair)
            normalized.append(e)

        self.vertices: tuple[str, ...] = tuple(sorted(vlabels))
        self.edges: tuple[Edge, ...] = tuple(normalized)
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        self._edge_by_id = {e.id: e for e in self.edges}
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.u].append(e.id)
            adj[e.v].append(e.id)
        self.adjacency: dict[str, tuple[str, ...]] = {
            v: tuple(ids) for v, ids in adj.items()
        }
        self.vertex_distances = self._check_connected_and_consistent()

    # -- validation -----------------------------------------------------

    def _check_connected_and_consistent(self) -> np.ndarray:
        n = len(self.vertices)
        if self.edges:
            rows, cols, data = [], [], []
            for e in self.edges:
                i, j = self._vindex[e.u], self._vindex[e.v]
                rows += [i, j]
                cols += [j, i]
                data += [e.length, e.length]
            weights = csr_matrix((data, (rows, cols)), shape=(n, n))
            dist = dijkstra(weights, directed=False)
        else:
            dist = np.zeros((n, n))
        if np.isinf(dist).any():
            raise NotConnectedError("graph is not connected")
        dist = np.minimum(dist, dist.T)

        max_len = max((e.length for e in self.edges), default=0.0)
        tol = DISTANCE_TOL_SCALE * max_len
        for e in self.edges:
            shortest = dist[self._vindex[e.u], self._vindex[e.v]]
            if shortest < e.length - tol:
                raise DistanceInconsistentError(
                    f"edge {e.id!r} has length {e.length} but a route of "
                    f"length {shortest} connects its endpoints",
                    edge_id=e.id,
                    shortest=float(shortest),
                )
        return dist

    # -- lookups ----------------------------------------------------------

    def vertex_index(self, label: str) -> int:
        try:
            return self._vindex[label]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex {label!r}", vertex=label)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_by_id[edge_id]
        except KeyError:
            raise UnknownEdgeError(f"unknown edge {edge_id!r}", edge_id=edge_id)

    def degree(self, label: str) -> int:
        self.vertex_index(label)
        return len(self.adjacency[label])

    def has_edge_between(self, u: str, v: str) -> bool:
        return any(self._edge_by_id[eid].other(u) == v for eid in self.adjacency[u])

    @property
    def total_length(self) -> float:
        return float(sum(e.length for e in self.edges))

    def __repr__(self) -> str:
        return (
            f"EuclideanGraph({len(self.vertices)} vertices, "
            f"{len(self.edges)} edges)"
        )


def build_graph(vertices, edges) -> EuclideanGraph:
    """Construct and validate a graph with Euclidean edges.

    Edges may be given as :class:`Edge` instances, dicts with keys
    ``id``/``u``/``v``/``length`` (``id`` optional), or tuples
    ``(id, u, v, length)`` / ``(u, v, length)``.
    """
    return EuclideanGraph(vertices, edges)


def is_tree(g: EuclideanGraph) -> bool:
    """True when the (connected) graph has no cycles."""
    return len(g.edges) == len(g.vertices) - 1


def canonicalize(g: EuclideanGraph, p: GraphPoint) -> GraphPoint:
    """Normalize a point: boundary offsets become the endpoint vertex."""
    if p.is_vertex:
        g.vertex_index(p.vertex)
        return GraphPoint(vertex=p.vertex)
    if p.edge is None or p.offset is None:
        raise OffsetOutOfRangeError(f"malformed point {p!r}")
    e = g.edge(p.edge)
    off = float(p.offset)
    if not math.isfinite(off) or off < 0.0 or off > e.length:
        raise OffsetOutOfRangeError(
            f"offset {off} outside [0, {e.length}] on edge {e.id!r}",
            edge_id=e.id,
            offset=off,
        )
    if off == 0.0:
        return GraphPoint(vertex=e.u)
    if off == e.length:
        return GraphPoint(vertex=e.v)
    return GraphPoint(edge=e.id, offset=off)


def _unique_label(base: str, taken) -> str:
    if base not in taken:
        return base
    k = 2
    while f"{base}~{k}" in taken:
        k += 1
    return f"{base}~{k}"


def split_edge(
    g: EuclideanGraph, p: GraphPoint, new_vertex: str | None = None
) -> tuple[EuclideanGraph, str]:
    """Split an edge at an interior point, returning (new graph, new vertex).

    The replaced edge ``e`` becomes two edges whose ids default to ``e.id + ":a"``
    (the side containing ``e.u``) and ``e.id + ":b"``; the new vertex label
    defaults to ``"{e.id}@{offset}"``.  All other edges are untouched and both
    metrics on the point continuum are unchanged by this operation.
    """
    p = canonicalize(g, p)
    if p.is_vertex:
        raise OffsetOutOfRangeError(
            "split point must lie strictly inside an edge", vertex=p.vertex
        )
    e = g.edge(p.edge)
    taken_vertices = set(g.vertices)
    w = new_vertex if new_vertex is not None else f"{e.id}@{p.offset!r}"
    w = _unique_label(str(w), taken_vertices)
    taken_edges = set(g._edge_by_id) - {e.id}
    left_id = _unique_label(f"{e.id}:a", taken_edges)
    right_id = _unique_label(f"{e.id}:b", taken_edges | {left_id})

    edges = [other for other in g.edges if other.id != e.id]
    edges.append(Edge(left_id, e.u, w, p.offset))
    edges.append(Edge(right_id, w, e.v, e.length - p.offset))
    return EuclideanGraph([*g.vertices, w], edges), w


def merge_at_degree_two(g: EuclideanGraph, v: str) -> EuclideanGraph:
    """Remove a degree-2 vertex, merging its two edges into one.

    Refuses (rather than silently generalizing) when the merged edge would be
    a loop or duplicate an existing edge, e.g. merging any vertex of a
    triangle; in that case the vertex must be kept.
    """
    if g.degree(v) != 2:
        raise NotDegreeTwoError(
            f"vertex {v!r} has degree {g.degree(v)}, expected 2", vertex=v
        )
    eid1, eid2 = sorted(g.adjacency[v])
    e1, e2 = g.edge(eid1), g.edge(eid2)
    a, b = e1.other(v), e2.other(v)
    if a == b:
        raise WouldCreateMultiEdgeOrLoopError(
            f"merging at {v!r} would create a loop at {a!r}", vertex=v
        )
    if g.has_edge_between(a, b):
        raise WouldCreateMultiEdgeOrLoopError(
            f"merging at {v!r} would duplicate the edge between {a!r} and {b!r}",
            vertex=v,
        )
    taken_edges = set(g._edge_by_id) - {e1.id, e2.id}
    merged_id = _unique_label(f"{e1.id}+{e2.id}", taken_edges)
    edges = [e for e in g.edges if e.id not in (e1.id, e2.id)]
    edges.append(Edge(merged_id, a, b, e1.length + e2.length))
    vertices = [u for u in g.vertices if u != v]
    return EuclideanGraph(vertices, edges)


# -- block structure -------------------------------------------------------


class BlockKind(str, Enum):
    BRIDGE = "Bridge"
    CYCLE = "Cycle"
    COMPLEX = "Complex"


class GeodesicValidity(str, Enum):
    SAFE = "SafeForGeodesic"
    FORBIDDEN = "ForbiddenForGeodesic"


@dataclass(frozen=True)
class Block:
    edge_ids: frozenset[str]
    vertices: frozenset[str]
    kind: BlockKind


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[Block, ...]
    articulation_vertices: frozenset[str]


def block_decomposition(g: EuclideanGraph) -> BlockDecomposition:
    """Biconnected components with a kind per block.

    Kinds are exhaustive and exclusive: Bridge (single edge), Cycle (as many
    edges as vertices within the block, i.e. a simple ring), Complex (more
    edges than vertices, i.e. the block contains two points joined by three
    internally disjoint routes).  Uses an iterative depth-first search so
    large graphs do not hit the recursion limit.
    """
    neighbors = {
        v: tuple((eid, g.edge(eid).other(v)) for eid in g.adjacency[v])
        for v in g.vertices
    }
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    counter = 0
    edge_stack: list[str] = []
    raw_blocks: list[frozenset[str]] = []
    articulation: set[str] = set()

    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        root_children = 0
        frames = [(root, None, iter(neighbors[root]))]
        while frames:
            v, parent_eid, it = frames[-1]
            descended = False
            for eid, w in it:
                if eid == parent_eid:
                    continue
                if w not in disc:
                    edge_stack.append(eid)
                    disc[w] = low[w] = counter
                    counter += 1
                    frames.append((w, eid, iter(neighbors[w])))
                    descended = True
                    break
                if disc[w] < disc[v]:
                    edge_stack.append(eid)
                    if disc[w] < low[v]:
                        low[v] = disc[w]
            if descended:
                continue
            frames.pop()
            if not frames:
                continue
            u = frames[-1][0]
            if u == root:
                root_children += 1
            if low[v] < low[u]:
                low[u] = low[v]
            if low[v] >= disc[u]:
                block_edges = []
                while True:
                    eid = edge_stack.pop()
                    block_edges.append(eid)
                    if eid == parent_eid:
                        break
                raw_blocks.append(frozenset(block_edges))
                if u != root:
                    articulation.add(u)
        if root_children >= 2:
            articulation.add(root)

    blocks = []
    for edge_ids in raw_blocks:
        block_vertices = set()
        for eid in edge_ids:
            e = g.edge(eid)
            block_vertices.update((e.u, e.v))
        if len(edge_ids) == 1:
            kind = BlockKind.BRIDGE
        elif len(edge_ids) == len(block_vertices):
            kind = BlockKind.CYCLE
        else:
            kind = BlockKind.COMPLEX
        blocks.append(Block(edge_ids, frozenset(block_vertices), kind))
    return BlockDecomposition(tuple(blocks), frozenset(articulation))


def geodesic_validity_class(g: EuclideanGraph) -> GeodesicValidity:
    """Safe when every block is a bridge or a simple cycle.

    On such graphs the usual decaying radial profiles remain valid under the
    geodesic metric; a Complex block makes the graph forbidden for the
    exponential class under that metric.
    """
    decomposition = block_decomposition(g)
    for block in decomposition.blocks:
        if block.kind is BlockKind.COMPLEX:
            return GeodesicValidity.FORBIDDEN
    return GeodesicValidity.SAFE


# -- JSON wire format --------------------------------------------------------


def graph_to_json(g: EuclideanGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "u": e.u, "v": e.v, "length": e.length} for e in g.edges
        ],
    }


def graph_from_json(obj: dict) -> EuclideanGraph:
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise InvalidGraphError('graph JSON must have "vertices" and "edges"')
    return build_graph(obj["vertices"], obj["edges"])


def point_to_json(p: GraphPoint) -> dict:
    if p.is_vertex:
        return {"vertex": p.vertex}
    return {"edge": p.edge, "offset": p.offset}


def point_from_json(g: EuclideanGraph, obj: dict) -> GraphPoint:
    if not isinstance(obj, dict):
        raise OffsetOutOfRangeError(f"point JSON must be an object, got {obj!r}")
    if "vertex" in obj:
        return canonicalize(g, vertex_point(obj["vertex"]))
    if "edge" in obj and "offset" in obj:
        return canonicalize(g, edge_point(obj["edge"], obj["offset"]))
    raise OffsetOutOfRangeError(
        'point JSON must be {"vertex": ...} or {"edge": ..., "offset": ...}'
    )

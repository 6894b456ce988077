"""Geodesic and resistance metrics on the full point continuum of a graph.

The geodesic distance between two points is the length of the shortest route
between them; for vertices this is the usual weighted shortest-path metric,
and point queries reduce to lookups in the cached all-pairs vertex table.

The resistance metric is the variogram of a canonical Gaussian field: a
multivariate Gaussian on the vertices with covariance ``L^-1`` (where ``L``
is the conductance Laplacian, conductance = 1/length, plus a unit bump at an
origin vertex that makes it strictly positive definite), linearly
interpolated along edges, plus an independent Brownian bridge on each edge.
Its kernels ``r_mu``/``r_edge``/``r_graph`` are evaluated here in closed
form, and the induced distance coincides with classical effective resistance
on the vertices.  The distance is invariant to the origin choice and to
splitting or merging edges, and never exceeds the geodesic distance, with
equality exactly on trees.

``oracle_effective_resistance`` is an independent cross-check: it assembles
the plain conductance Laplacian of the network with the query points added
as nodes and evaluates the resistance through an eigenvalue pseudoinverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import (
    DuplicatePointsError,
    FactorizationFailedError,
    NotATreeError,
)
from .graph import (
    EuclideanGraph,
    GraphPoint,
    canonicalize,
    is_tree,
    vertex_point,
)

# Above this vertex count the inverse of L is not materialized; entries are
# obtained through cached triangular solves instead.
DENSE_INVERSE_MAX = 2000

# Relative eigenvalue cutoff identifying the null space of the combinatorial
# Laplacian in the oracle's pseudoinverse.
_PINV_RTOL = 1e-12


class MetricKind(str, Enum):
    GEODESIC = "geodesic"
    RESISTANCE = "resistance"


# -- point bookkeeping -------------------------------------------------------


def canonical_points(g: EuclideanGraph, points) -> list[GraphPoint]:
    return [canonicalize(g, p) for p in points]


def _point_frame(g: EuclideanGraph, points):
    """Decompose canonical points into endpoint indices and edge coordinates.

    Returns arrays (lo, hi, frac, elen, eidx): the vertex indices of the low
    and high endpoints, the relative position in [0, 1), the containing edge
    length, and the containing edge's index in ``g.edges`` (-1 for vertices).
    """
    edge_index = {e.id: k for k, e in enumerate(g.edges)}
    m = len(points)
    lo = np.empty(m, dtype=np.intp)
    hi = np.empty(m, dtype=np.intp)
    frac = np.zeros(m)
    elen = np.zeros(m)
    eidx = np.full(m, -1, dtype=np.intp)
    for k, p in enumerate(points):
        if p.is_vertex:
            i = g.vertex_index(p.vertex)
            lo[k] = hi[k] = i
        else:
            e = g.edge(p.edge)
            lo[k] = g.vertex_index(e.u)
            hi[k] = g.vertex_index(e.v)
            frac[k] = p.offset / e.length
            elen[k] = e.length
            eidx[k] = edge_index[e.id]
    return lo, hi, frac, elen, eidx


def relative_position(g: EuclideanGraph, p: GraphPoint) -> float:
    """Position of a point along its edge as a proportion of the length.

    Vertices return 0; an interior point at ``offset`` on an edge of length
    ``L`` returns ``offset / L``.
    """
    p = canonicalize(g, p)
    if p.is_vertex:
        return 0.0
    return p.offset / g.edge(p.edge).length


# -- geodesic metric ---------------------------------------------------------


def geodesic_distance(g: EuclideanGraph, p: GraphPoint, q: GraphPoint) -> float:
    """Length of the shortest route between two points of the continuum.

    Routes through the four endpoint pairings are compared, plus the direct
    within-edge segment when both points lie on the same edge (required for
    correctness on cycles, where the around route can be longer).
    """
    p = canonicalize(g, p)
    q = canonicalize(g, q)
    if p == q:
        return 0.0
    dist = g.vertex_distances
    plo, phi, p_to_lo, p_to_hi = _endpoint_legs(g, p)
    qlo, qhi, q_to_lo, q_to_hi = _endpoint_legs(g, q)
    best = min(
        p_to_lo + dist[plo, qlo] + q_to_lo,
        p_to_lo + dist[plo, qhi] + q_to_hi,
        p_to_hi + dist[phi, qlo] + q_to_lo,
        p_to_hi + dist[phi, qhi] + q_to_hi,
    )
    if not p.is_vertex and not q.is_vertex and p.edge == q.edge:
        best = min(best, abs(p.offset - q.offset))
    return float(best)


def _endpoint_legs(g: EuclideanGraph, p: GraphPoint):
    if p.is_vertex:
        i = g.vertex_index(p.vertex)
        return i, i, 0.0, 0.0
    e = g.edge(p.edge)
    return (
        g.vertex_index(e.u),
        g.vertex_index(e.v),
        p.offset,
        e.length - p.offset,
    )


# -- resistance metric -------------------------------------------------------


@dataclass
class ResistanceContext:
    """Origin choice plus the factored matrix L enabling kernel evaluation.

    ``L`` is the conductance Laplacian of the network (conductance of an edge
    is 1/length) with an extra unit added on the diagonal at the origin
    vertex, which makes it strictly positive definite.  The context is
    immutable in use and safe for concurrent queries.
    """

    graph: EuclideanGraph
    origin: str
    L: np.ndarray
    _chol_lower: np.ndarray
    _linv: np.ndarray | None
    _column_cache: dict = field(default_factory=dict, repr=False)

    @property
    def origin_index(self) -> int:
        return self.graph.vertex_index(self.origin)

    @property
    def cholesky_factor(self) -> np.ndarray:
        """Lower-triangular M with M @ M.T = L."""
        return self._chol_lower

    def linv_column(self, j: int) -> np.ndarray:
        if self._linv is not None:
            return self._linv[:, j]
        col = self._column_cache.get(j)
        if col is None:
            rhs = np.zeros(self.L.shape[0])
            rhs[j] = 1.0
            col = scipy.linalg.cho_solve((self._chol_lower, True), rhs)
            self._column_cache[j] = col
        return col

    def linv_entry(self, i: int, j: int) -> float:
        if self._linv is not None:
            return float(self._linv[i, j])
        # Solve for the smaller index so the cache is shared across pairs.
        return float(self.linv_column(min(i, j))[max(i, j)])

    def linv_block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        if self._linv is not None:
            return self._linv[np.ix_(rows, cols)]
        needed = np.unique(cols)
        gathered = np.column_stack([self.linv_column(int(j)) for j in needed])
        pos = {int(j): k for k, j in enumerate(needed)}
        return gathered[np.ix_(rows, [pos[int(j)] for j in cols])]


def build_resistance_context(
    g: EuclideanGraph,
    origin: str | None = None,
    *,
    dense_inverse_max: int = DENSE_INVERSE_MAX,
) -> ResistanceContext:
    """Assemble and factor L; the origin defaults to the smallest label.

    Raises :class:`FactorizationFailedError` if the Cholesky factorization
    fails, which signals a numerically singular L and should be impossible
    for a validated graph.
    """
    if origin is None:
        origin = g.vertices[0]
    io = g.vertex_index(origin)
    n = len(g.vertices)
    L = np.zeros((n, n))
    for e in g.edges:
        i, j = g.vertex_index(e.u), g.vertex_index(e.v)
        c = 1.0 / e.length
        L[i, j] -= c
        L[j, i] -= c
        L[i, i] += c
        L[j, j] += c
    L[io, io] += 1.0
    try:
        chol = np.linalg.cholesky(L)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailedError(
            f"conductance matrix is numerically singular: {exc}"
        ) from exc
    linv = None
    if n <= dense_inverse_max:
        linv = scipy.linalg.cho_solve((chol, True), np.eye(n))
        linv = 0.5 * (linv + linv.T)
    return ResistanceContext(graph=g, origin=origin, L=L, _chol_lower=chol, _linv=linv)


def r_mu(ctx: ResistanceContext, p: GraphPoint, q: GraphPoint) -> float:
    """Covariance of the interpolated vertex field between two points."""
    g = ctx.graph
    p = canonicalize(g, p)
    q = canonicalize(g, q)
    plo, phi, a = _interp_frame(g, p)
    qlo, qhi, b = _interp_frame(g, q)
    t12 = a * b * ctx.linv_entry(phi, qhi) + (1.0 - a) * (1.0 - b) * ctx.linv_entry(
        plo, qlo
    )
    t34 = a * (1.0 - b) * ctx.linv_entry(phi, qlo) + (1.0 - a) * b * ctx.linv_entry(
        plo, qhi
    )
    return float(t12 + t34)


def _interp_frame(g: EuclideanGraph, p: GraphPoint):
    if p.is_vertex:
        i = g.vertex_index(p.vertex)
        return i, i, 0.0
    e = g.edge(p.edge)
    return g.vertex_index(e.u), g.vertex_index(e.v), p.offset / e.length


def r_edge(g: EuclideanGraph, p: GraphPoint, q: GraphPoint) -> float:
    """Brownian-bridge covariance; nonzero only for interior points sharing
    an edge, where it equals ``(min(a, b) - a*b) * length`` in relative
    positions ``a``, ``b``."""
    p = canonicalize(g, p)
    q = canonicalize(g, q)
    if p.is_vertex or q.is_vertex or p.edge != q.edge:
        return 0.0
    e = g.edge(p.edge)
    a = p.offset / e.length
    b = q.offset / e.length
    return float((min(a, b) - a * b) * e.length)


def r_graph(ctx: ResistanceContext, p: GraphPoint, q: GraphPoint) -> float:
    """Covariance of the canonical field: vertex part plus bridge part."""
    return r_mu(ctx, p, q) + r_edge(ctx.graph, p, q)


def resistance_distance(ctx: ResistanceContext, p: GraphPoint, q: GraphPoint) -> float:
    """Variogram of the canonical field between two points.

    Equals classical effective resistance (conductance = 1/length) on the
    vertices, and extends it to edge points without re-assembling L.
    """
    g = ctx.graph
    p = canonicalize(g, p)
    q = canonicalize(g, q)
    if p == q:
        return 0.0
    return r_graph(ctx, p, p) + r_graph(ctx, q, q) - 2.0 * r_graph(ctx, p, q)


def tree_kernel_closed_form(
    ctx: ResistanceContext, p: GraphPoint, q: GraphPoint
) -> float:
    """Closed form of the canonical-field covariance valid on trees only:
    half the rooted-path overlap plus one."""
    g = ctx.graph
    if not is_tree(g):
        raise NotATreeError("closed form requires a tree")
    o = vertex_point(ctx.origin)
    return (
        0.5
        * (
            geodesic_distance(g, p, o)
            + geodesic_distance(g, q, o)
            - geodesic_distance(g, p, q)
        )
        + 1.0
    )


# -- independent oracle ------------------------------------------------------


def oracle_effective_resistance(
    g: EuclideanGraph, p: GraphPoint, q: GraphPoint
) -> float:
    """Effective resistance via the Laplacian pseudoinverse, for testing.

    Interior query points are materialized as extra nodes subdividing their
    edge; the combinatorial Laplacian (conductance = 1/segment length) is
    assembled from scratch and ``(e_p - e_q)^T K^+ (e_p - e_q)`` evaluated
    through an eigendecomposition, treating eigenvalues below a relative
    cutoff as the null space.  Deliberately shares no code with
    :func:`resistance_distance`.
    """
    p = canonicalize(g, p)
    q = canonicalize(g, q)
    if p == q:
        return 0.0

    labels = list(g.vertices)
    index = {v: i for i, v in enumerate(labels)}

    def node_for(point: GraphPoint, tag: str) -> int:
        if point.is_vertex:
            return index[point.vertex]
        index[tag] = len(labels)
        labels.append(tag)
        return index[tag]

    cuts: dict[str, list[tuple[float, int]]] = {}
    ip = node_for(p, "@p")
    if not p.is_vertex:
        cuts.setdefault(p.edge, []).append((p.offset, ip))
    iq = node_for(q, "@q")
    if not q.is_vertex:
        cuts.setdefault(q.edge, []).append((q.offset, iq))

    segments: list[tuple[int, int, float]] = []
    for e in g.edges:
        prev_node = index[e.u]
        prev_off = 0.0
        for off, node in sorted(cuts.get(e.id, [])):
            segments.append((prev_node, node, off - prev_off))
            prev_node, prev_off = node, off
        segments.append((prev_node, index[e.v], e.length - prev_off))

    n = len(labels)
    lap = np.zeros((n, n))
    for a, b, seg_len in segments:
        c = 1.0 / seg_len
        lap[a, a] += c
        lap[b, b] += c
        lap[a, b] -= c
        lap[b, a] -= c

    eigenvalues, eigenvectors = np.linalg.eigh(lap)
    cutoff = _PINV_RTOL * eigenvalues[-1]
    rhs = np.zeros(n)
    rhs[ip] = 1.0
    rhs[iq] = -1.0
    coeffs = eigenvectors.T @ rhs
    keep = eigenvalues > cutoff
    return float(np.sum(coeffs[keep] ** 2 / eigenvalues[keep]))


# -- pairwise matrices -------------------------------------------------------


def _require_distinct(points: list[GraphPoint]) -> None:
    seen = set()
    for p in points:
        key = (p.vertex, p.edge, p.offset)
        if key in seen:
            from .graph import point_label

            raise DuplicatePointsError(f"duplicate point {point_label(p)!r}")
        seen.add(key)


def geodesic_matrix(g: EuclideanGraph, points) -> np.ndarray:
    """Pairwise geodesic distances for canonical points (vectorized)."""
    lo, hi, frac, elen, eidx = _point_frame(g, points)
    dist = g.vertex_distances
    to_lo = frac * elen
    to_hi = (1.0 - frac) * elen
    best = to_lo[:, None] + dist[np.ix_(lo, lo)] + to_lo[None, :]
    np.minimum(best, to_lo[:, None] + dist[np.ix_(lo, hi)] + to_hi[None, :], out=best)
    np.minimum(best, to_hi[:, None] + dist[np.ix_(hi, lo)] + to_lo[None, :], out=best)
    np.minimum(best, to_hi[:, None] + dist[np.ix_(hi, hi)] + to_hi[None, :], out=best)
    shared_edge = (eidx[:, None] == eidx[None, :]) & (eidx[:, None] >= 0)
    if shared_edge.any():
        offs = frac * elen
        direct = np.abs(offs[:, None] - offs[None, :])
        best = np.where(shared_edge, np.minimum(best, direct), best)
    np.fill_diagonal(best, 0.0)
    return np.minimum(best, best.T)


def r_graph_matrix(ctx: ResistanceContext, points) -> np.ndarray:
    """Canonical-field covariance matrix for canonical points (vectorized)."""
    lo, hi, frac, elen, eidx = _point_frame(ctx.graph, points)
    a = frac
    one_m = 1.0 - frac
    t12 = np.outer(a, a) * ctx.linv_block(hi, hi) + np.outer(
        one_m, one_m
    ) * ctx.linv_block(lo, lo)
    t34 = np.outer(a, one_m) * ctx.linv_block(hi, lo) + np.outer(
        one_m, a
    ) * ctx.linv_block(lo, hi)
    cov = t12 + t34
    shared_edge = (eidx[:, None] == eidx[None, :]) & (eidx[:, None] >= 0)
    if shared_edge.any():
        bridge = (np.minimum(a[:, None], a[None, :]) - np.outer(a, a)) * elen[:, None]
        cov = np.where(shared_edge, cov + bridge, cov)
    # No-op when the inverse was materialized (already exactly symmetric);
    # repairs last-ulp asymmetry from per-column solves otherwise.
    return 0.5 * (cov + cov.T)


def resistance_matrix(ctx: ResistanceContext, points) -> np.ndarray:
    cov = r_graph_matrix(ctx, points)
    diag = np.diag(cov).copy()
    out = diag[:, None] + diag[None, :] - 2.0 * cov
    np.fill_diagonal(out, 0.0)
    return out


def distance_matrix(
    g: EuclideanGraph,
    points,
    kind: MetricKind,
    *,
    origin: str | None = None,
    ctx: ResistanceContext | None = None,
) -> np.ndarray:
    """Symmetric matrix of pairwise distances under the chosen metric.

    Points must be pairwise distinct after canonicalization.  For the
    resistance metric an existing context can be passed to reuse its
    factorization.
    """
    kind = MetricKind(kind)
    pts = canonical_points(g, points)
    _require_distinct(pts)
    if kind is MetricKind.GEODESIC:
        return geodesic_matrix(g, pts)
    if ctx is None:
        ctx = build_resistance_context(g, origin)
    elif ctx.graph is not g:
        raise ValueError("context was built for a different graph")
    return resistance_matrix(ctx, pts)

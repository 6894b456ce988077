"""Gaussian field simulation on graphs and empirical variograms.

Two samplers are provided.  ``sample_from_covariance`` draws from any PSD
covariance matrix through a triangular factorization.  The constructive
``sample_canonical_field`` never forms the point covariance: it draws the
vertex field by a triangular solve against the factored conductance matrix,
interpolates linearly along edges, and adds an independent Brownian-bridge
contribution per edge evaluated exactly at the sampled offsets.  The
empirical variogram of such samples converges to the resistance distance,
which is how the metric is verified end to end.

Reproducibility: all draws derive from ``numpy.random.SeedSequence(seed)``
with the Philox counter-based generator.  Stream derivation is fixed by
convention -- child 0 drives the vertex field (or the covariance sampler),
and child 1 + k drives the bridge on the k-th edge in sorted edge-id order
-- so results are bit-identical for a given seed regardless of how the work
is ordered or parallelized.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotPSDError, TooFewSamplesError
from .graph import GraphPoint, point_label
from .metrics import ResistanceContext, canonical_points
from .kernels import psd_check

# Jitter added to a covariance diagonal when its factorization is borderline;
# never exceeds this factor times the largest diagonal entry.
JITTER_SCALE = 1e-10


@dataclass(frozen=True)
class FieldSample:
    """Draws of a zero-mean Gaussian field at a labeled point set.

    ``draws`` has one row per independent realization and one column per
    point.  ``jitter`` records any diagonal regularization that was applied
    before factorizing a covariance (0.0 for the constructive sampler's
    vertex stage unless its bridge factorizations needed it).
    """

    labels: tuple[str, ...]
    draws: np.ndarray
    seed: int
    points: tuple[GraphPoint, ...] | None = None
    jitter: float = 0.0


def _chol_with_jitter(cov: np.ndarray, what: str) -> tuple[np.ndarray, float]:
    if not cov.any():
        return np.zeros_like(cov), 0.0
    try:
        return np.linalg.cholesky(cov), 0.0
    except np.linalg.LinAlgError:
        pass
    jitter = JITTER_SCALE * max(float(np.max(np.diag(cov))), 0.0)
    if jitter > 0.0:
        try:
            factor = np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
            warnings.warn(
                f"added diagonal jitter {jitter:g} to factorize {what}",
                stacklevel=3,
            )
            return factor, jitter
        except np.linalg.LinAlgError:
            pass
    raise NotPSDError(f"{what} is not positive semi-definite enough to factorize")


def _generator(seed_seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed_seq))


def sample_from_covariance(
    cov,
    n: int,
    seed: int,
    *,
    labels=None,
    points=None,
) -> FieldSample:
    """Draw ``n`` independent zero-mean vectors with the given covariance."""
    cov = np.asarray(cov, dtype=float)
    if n < 1:
        raise TooFewSamplesError(f"need at least 1 draw, got {n}")
    report = psd_check(cov)
    if not report.is_psd:
        raise NotPSDError(
            f"covariance is not PSD (min eigenvalue {report.min_eig:g})"
        )
    factor, jitter = _chol_with_jitter(cov, "covariance matrix")
    rng = _generator(np.random.SeedSequence(seed).spawn(1)[0])
    normals = rng.standard_normal((n, cov.shape[0]))
    draws = normals @ factor.T
    if labels is None:
        labels = tuple(f"p{k}" for k in range(cov.shape[0]))
    return FieldSample(
        labels=tuple(labels),
        draws=draws,
        seed=int(seed),
        points=tuple(points) if points is not None else None,
        jitter=jitter,
    )


def sample_canonical_field(
    ctx: ResistanceContext, points, n: int, seed: int
) -> FieldSample:
    """Constructively sample the canonical field at a finite point set.

    Vertex values are drawn with covariance equal to the inverse conductance
    matrix by solving ``M^T z = w`` against the Cholesky factor ``M`` (no
    explicit inverse), interpolated to edge points by relative position, and
    each edge with sampled interior points receives an independent bridge
    draw whose covariance is the exact bridge kernel at those offsets.  The
    resulting finite-dimensional law has exactly the canonical covariance.
    """
    if n < 1:
        raise TooFewSamplesError(f"need at least 1 draw, got {n}")
    g = ctx.graph
    pts = canonical_points(g, points)
    m = len(pts)

    root = np.random.SeedSequence(seed)
    sorted_edge_ids = sorted(e.id for e in g.edges)
    streams = root.spawn(1 + len(sorted_edge_ids))
    edge_stream = {eid: streams[1 + k] for k, eid in enumerate(sorted_edge_ids)}

    vertex_rng = _generator(streams[0])
    n_vertices = len(g.vertices)
    white = vertex_rng.standard_normal((n, n_vertices))
    z = scipy.linalg.solve_triangular(
        ctx.cholesky_factor.T, white.T, lower=False
    ).T

    draws = np.empty((n, m))
    by_edge: dict[str, list[int]] = {}
    for k, p in enumerate(pts):
        if p.is_vertex:
            draws[:, k] = z[:, g.vertex_index(p.vertex)]
        else:
            e = g.edge(p.edge)
            frac = p.offset / e.length
            iu, iv = g.vertex_index(e.u), g.vertex_index(e.v)
            draws[:, k] = (1.0 - frac) * z[:, iu] + frac * z[:, iv]
            by_edge.setdefault(e.id, []).append(k)

    total_jitter = 0.0
    for eid in sorted(by_edge):
        cols = by_edge[eid]
        e = g.edge(eid)
        fracs = np.array([pts[k].offset / e.length for k in cols])
        bridge_cov = (
            np.minimum(fracs[:, None], fracs[None, :]) - np.outer(fracs, fracs)
        ) * e.length
        factor, jitter = _chol_with_jitter(bridge_cov, f"bridge covariance on {eid!r}")
        total_jitter = max(total_jitter, jitter)
        rng = _generator(edge_stream[eid])
        bridge = rng.standard_normal((n, len(cols))) @ factor.T
        draws[:, cols] += bridge

    return FieldSample(
        labels=tuple(point_label(p) for p in pts),
        draws=draws,
        seed=int(seed),
        points=tuple(pts),
        jitter=total_jitter,
    )


def empirical_variogram(sample: FieldSample) -> np.ndarray:
    """Matrix of sample variances of Z(p_i) - Z(p_j) across draws."""
    draws = sample.draws
    if draws.shape[0] < 2:
        raise TooFewSamplesError(
            f"variogram needs at least 2 draws, got {draws.shape[0]}"
        )
    cov = np.cov(draws, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    diag = np.diag(cov).copy()
    out = diag[:, None] + diag[None, :] - 2.0 * cov
    np.fill_diagonal(out, 0.0)
    return out

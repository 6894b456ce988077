"""Command-line front end over the JSON/CSV interfaces.

Commands read graphs, point lists, and kernel specs from JSON files (or
stdin via ``-``) and write JSON to stdout, or to ``--out``; matrix- and
sample-shaped payloads are written as CSV instead when the ``--out`` path
ends in ``.csv``.  Exit codes: 0 success, 1 I/O or parse errors, 2
validation failures (including a not-PSD verdict under ``--strict``).
Errors are emitted as machine-readable JSON objects on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .errors import GraphFieldsError
from .graph import (
    GeodesicValidity,
    block_decomposition,
    geodesic_validity_class,
    graph_from_json,
    point_from_json,
    point_label,
)
from .kernels import (
    covariance_matrix,
    forbidden_certificate,
    kernel_spec_from_json,
    kernel_spec_to_json,
    radial_profile,
    star_inequality_check,
)
from .metrics import (
    MetricKind,
    build_resistance_context,
    canonical_points,
    distance_matrix,
    geodesic_distance,
    resistance_distance,
)
from .simulate import empirical_variogram, sample_canonical_field, sample_from_covariance

# Point pairs closer than this are refused in covariance construction so the
# PSD certificate is not dominated by near-duplicate rows.
MIN_POINT_SEPARATION = 1e-12

_STAR_CHECK_DEFAULT_T = [round(0.1 * k, 10) for k in range(1, 21)]


class _CliFailure(Exception):
    def __init__(self, exit_code: int, payload: dict):
        super().__init__(payload.get("message", ""))
        self.exit_code = exit_code
        self.payload = payload


def _read_json(path: str, what: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _CliFailure(
            1, {"error": "InputError", "message": f"cannot read {what}: {exc}"}
        ) from exc


def _parse_inline_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliFailure(
            1, {"error": "InputError", "message": f"cannot parse {what}: {exc}"}
        ) from exc


def _load_graph(path: str):
    return graph_from_json(_read_json(path, "graph"))


def _load_points(g, path: str):
    raw = _read_json(path, "points")
    if not isinstance(raw, list):
        raise _CliFailure(
            1, {"error": "InputError", "message": "points file must be a JSON array"}
        )
    return [point_from_json(g, obj) for obj in raw]


def _load_kernel(path: str):
    return kernel_spec_from_json(_read_json(path, "kernel spec"))


def _matrix_csv(labels, matrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(labels)
    for row in np.asarray(matrix):
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def _emit(args, payload: dict, *, csv_text: str | None = None) -> None:
    out = getattr(args, "out", None)
    if out and csv_text is not None and out.endswith(".csv"):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
        return
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _matrix_payload(metric: str, labels, matrix, **extra) -> dict:
    payload = {
        "metric": metric,
        "labels": list(labels),
        "matrix": [[float(x) for x in row] for row in np.asarray(matrix)],
    }
    payload.update(extra)
    return payload


def _psd_json(report) -> dict:
    return {
        "verdict": report.verdict,
        "min_eig": report.min_eig,
        "max_eig": report.max_eig,
    }


# -- command implementations --------------------------------------------------


def _cmd_validate(args) -> int:
    g = _load_graph(args.graph)
    _emit(
        args,
        {
            "valid": True,
            "n_vertices": len(g.vertices),
            "n_edges": len(g.edges),
            "total_length": g.total_length,
        },
    )
    return 0


def _cmd_blocks(args) -> int:
    g = _load_graph(args.graph)
    decomposition = block_decomposition(g)
    _emit(
        args,
        {
            "class": geodesic_validity_class(g).value,
            "articulation_vertices": sorted(decomposition.articulation_vertices),
            "blocks": [
                {
                    "kind": b.kind.value,
                    "edges": sorted(b.edge_ids),
                    "vertices": sorted(b.vertices),
                }
                for b in decomposition.blocks
            ],
        },
    )
    return 0


def _cmd_dist(args) -> int:
    g = _load_graph(args.graph)
    kind = MetricKind(args.metric)
    p = point_from_json(g, _parse_inline_json(args.from_point, "--from point"))
    q = point_from_json(g, _parse_inline_json(args.to_point, "--to point"))
    payload = {
        "metric": kind.value,
        "from": point_label(p),
        "to": point_label(q),
    }
    if kind is MetricKind.GEODESIC:
        payload["value"] = geodesic_distance(g, p, q)
    else:
        ctx = build_resistance_context(g, args.origin)
        payload["value"] = resistance_distance(ctx, p, q)
        payload["origin"] = ctx.origin
    _emit(args, payload)
    return 0


def _cmd_distmatrix(args) -> int:
    g = _load_graph(args.graph)
    kind = MetricKind(args.metric)
    points = _load_points(g, args.points)
    labels = [point_label(p) for p in canonical_points(g, points)]
    extra = {}
    if kind is MetricKind.RESISTANCE:
        ctx = build_resistance_context(g, args.origin)
        matrix = distance_matrix(g, points, kind, ctx=ctx)
        extra["origin"] = ctx.origin
    else:
        matrix = distance_matrix(g, points, kind)
    _emit(
        args,
        _matrix_payload(kind.value, labels, matrix, **extra),
        csv_text=_matrix_csv(labels, matrix),
    )
    return 0


def _cmd_cov(args) -> int:
    g = _load_graph(args.graph)
    kind = MetricKind(args.metric)
    points = _load_points(g, args.points)
    spec = _load_kernel(args.kernel)
    cov = covariance_matrix(
        g,
        points,
        spec,
        kind,
        origin=args.origin,
        rel_tol=args.tol,
        min_separation=MIN_POINT_SEPARATION,
    )
    extra = {"kernel": kernel_spec_to_json(spec), "psd_certificate": _psd_json(cov.psd_certificate)}
    if kind is MetricKind.RESISTANCE:
        extra["origin"] = args.origin if args.origin else g.vertices[0]
    _emit(
        args,
        _matrix_payload(kind.value, cov.labels, cov.values, **extra),
        csv_text=_matrix_csv(cov.labels, cov.values),
    )
    if args.strict and not cov.psd_certificate.is_psd:
        raise _CliFailure(
            2,
            {
                "error": "NotPSD",
                "message": "covariance matrix failed the PSD check",
                **_psd_json(cov.psd_certificate),
            },
        )
    return 0


def _cmd_psd_check(args) -> int:
    g = _load_graph(args.graph)
    kind = MetricKind(args.metric)
    points = _load_points(g, args.points)
    spec = _load_kernel(args.kernel)
    cov = covariance_matrix(
        g,
        points,
        spec,
        kind,
        origin=args.origin,
        rel_tol=args.tol,
        min_separation=MIN_POINT_SEPARATION,
    )
    report = cov.psd_certificate
    _emit(args, _psd_json(report))
    if args.strict and not report.is_psd:
        raise _CliFailure(
            2,
            {
                "error": "NotPSD",
                "message": "covariance matrix failed the PSD check",
                **_psd_json(report),
            },
        )
    return 0


def _cmd_forbidden_check(args) -> int:
    g = _load_graph(args.graph)
    validity = geodesic_validity_class(g)
    payload = {"class": validity.value}
    if validity is GeodesicValidity.FORBIDDEN:
        witness = forbidden_certificate(0.5, 1.0)
        payload["witness"] = {
            "t": witness.t,
            "r": witness.r,
            "xi_value": witness.xi_value,
            "quadratic_form": witness.quadratic_form,
            "beta_found": witness.beta_found,
            "negative_eigenvalue": witness.negative_eigenvalue,
        }
    _emit(args, payload)
    return 0


def _cmd_star_check(args) -> int:
    spec = _load_kernel(args.kernel)
    profile = lambda t: radial_profile(spec, t)  # noqa: E731
    results = star_inequality_check(profile, args.n, _STAR_CHECK_DEFAULT_T)
    all_pass = all(r.passed for r in results)
    _emit(
        args,
        {
            "kernel": kernel_spec_to_json(spec),
            "n": args.n,
            "results": [
                {
                    "t": r.t,
                    "lower_ok": r.lower_ok,
                    "upper_ok": r.upper_ok,
                    "cross_ok": r.cross_ok,
                    "passed": r.passed,
                }
                for r in results
            ],
            "all_pass": all_pass,
        },
    )
    if args.strict and not all_pass:
        raise _CliFailure(
            2,
            {"error": "StarInequalityFailed", "message": "some inequalities failed"},
        )
    return 0


def _cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    points = _load_points(g, args.points)
    if args.kernel:
        kind = MetricKind(args.metric)
        spec = _load_kernel(args.kernel)
        cov = covariance_matrix(
            g,
            points,
            spec,
            kind,
            origin=args.origin,
            min_separation=MIN_POINT_SEPARATION,
        )
        sample = sample_from_covariance(
            cov.values, args.n, args.seed, labels=cov.labels
        )
        model = {"model": "kernel", "kernel": kernel_spec_to_json(spec), "metric": kind.value}
    else:
        ctx = build_resistance_context(g, args.origin)
        sample = sample_canonical_field(ctx, points, args.n, args.seed)
        model = {"model": "canonical", "origin": ctx.origin}
    payload = {
        "labels": list(sample.labels),
        "seed": sample.seed,
        "n": int(sample.draws.shape[0]),
        "draws": [[float(x) for x in row] for row in sample.draws],
        **model,
    }
    _emit(args, payload, csv_text=_matrix_csv(sample.labels, sample.draws))
    return 0


def _cmd_variogram(args) -> int:
    g = _load_graph(args.graph)
    points = _load_points(g, args.points)
    ctx = build_resistance_context(g, args.origin)
    sample = sample_canonical_field(ctx, points, args.n, args.seed)
    vario = empirical_variogram(sample)
    _emit(
        args,
        _matrix_payload(
            "empirical_variogram",
            sample.labels,
            vario,
            n=int(sample.draws.shape[0]),
            seed=sample.seed,
            origin=ctx.origin,
        ),
        csv_text=_matrix_csv(sample.labels, vario),
    )
    return 0


# -- parser -------------------------------------------------------------------


def _add_common(p, *, graph=False, points=False, metric=False, kernel=False):
    if graph:
        p.add_argument("--graph", required=True, help="graph JSON file (or - for stdin)")
    if points:
        p.add_argument("--points", required=True, help="JSON array of point objects")
    if metric:
        p.add_argument(
            "--metric",
            choices=[k.value for k in MetricKind],
            default=MetricKind.RESISTANCE.value,
            help="which metric to use (default: resistance)",
        )
    if kernel:
        p.add_argument("--kernel", required=True, help="kernel spec JSON file")
    p.add_argument("--origin", default=None, help="origin vertex label (resistance)")
    p.add_argument("--out", default=None, help="write output here instead of stdout; .csv selects CSV for matrices/samples")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphfields",
        description="metrics, covariance kernels, and Gaussian fields on graphs with Euclidean edges",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a graph file")
    _add_common(p, graph=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("blocks", help="block decomposition and geodesic validity class")
    _add_common(p, graph=True)
    p.set_defaults(func=_cmd_blocks)

    p = sub.add_parser("dist", help="distance between two points")
    _add_common(p, graph=True, metric=True)
    p.add_argument("--from", dest="from_point", required=True, help="point JSON")
    p.add_argument("--to", dest="to_point", required=True, help="point JSON")
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("distmatrix", help="pairwise distance matrix over a point set")
    _add_common(p, graph=True, points=True, metric=True)
    p.set_defaults(func=_cmd_distmatrix)

    p = sub.add_parser("cov", help="covariance matrix with PSD certificate")
    _add_common(p, graph=True, points=True, metric=True, kernel=True)
    p.add_argument("--tol", type=float, default=1e-9, help="relative PSD tolerance")
    p.add_argument("--strict", action="store_true", help="exit 2 when not PSD")
    p.set_defaults(func=_cmd_cov)

    p = sub.add_parser("psd-check", help="PSD certificate for a kernel on a point set")
    _add_common(p, graph=True, points=True, metric=True, kernel=True)
    p.add_argument("--tol", type=float, default=1e-9, help="relative PSD tolerance")
    p.add_argument("--strict", action="store_true", help="exit 2 when not PSD")
    p.set_defaults(func=_cmd_psd_check)

    p = sub.add_parser(
        "forbidden-check",
        help="geodesic validity class, with a six-point witness when forbidden",
    )
    _add_common(p, graph=True)
    p.set_defaults(func=_cmd_forbidden_check)

    p = sub.add_parser("star-check", help="star covariance inequalities for a kernel")
    p.add_argument("--kernel", required=True, help="kernel spec JSON file")
    p.add_argument("--n", type=int, required=True, help="number of star edges")
    p.add_argument("--strict", action="store_true", help="exit 2 when any t fails")
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.set_defaults(func=_cmd_star_check)

    p = sub.add_parser("simulate", help="sample a Gaussian field at a point set")
    _add_common(p, graph=True, points=True, metric=True)
    p.add_argument("--kernel", default=None, help="sample a kernel covariance instead of the canonical field")
    p.add_argument("--n", type=int, default=1, help="number of draws")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("variogram", help="empirical variogram of the canonical field")
    _add_common(p, graph=True, points=True)
    p.add_argument("--n", type=int, default=20000, help="number of draws")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.set_defaults(func=_cmd_variogram)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliFailure as failure:
        sys.stderr.write(json.dumps(failure.payload) + "\n")
        return failure.exit_code
    except GraphFieldsError as exc:
        payload = {"error": exc.code, "message": str(exc)}
        payload.update(exc.detail)
        sys.stderr.write(json.dumps(payload) + "\n")
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()

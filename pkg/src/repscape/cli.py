"""Batch command-line interface.

Subcommands mirror the two analysis workflows plus the experiment
protocols. stdout carries only the headline scalar; all structured output
goes to files, written atomically. Exit codes: 0 success, 2 usage, 3 data
error, 4 computation error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import _serialize
from .dataset import (
    MixtureSpec,
    clustered_mixture,
    generate_synthetic,
    ingest_csv,
    parse_filter_spec,
    write_csv,
)
from .errors import COMPUTE_ERRORS, DATA_ERRORS, RepscapeError, ValidationError
from .heatmap import markers_csv, render_raster
from .histogram import EQUAL_WIDTH, HISTOGRAM_KINDS
from .pipeline import (
    default_bins,
    prepare_analysis,
    resolve_samples,
    run_baseline,
    run_ideal,
    score_samples,
    sites_csv,
)
from .representativeness import MODE_HEAT, MODE_WINDOW, MODES, ColorScale
from .selection import SelectionConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_COMPUTE = 4

DEFAULT_PORT = 8151


def _add_analysis_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="dataset CSV path")
    parser.add_argument("--variables", help="comma-separated analysis variables (default: all)")
    parser.add_argument("--filters", help="conjunctive filters, e.g. v0:1..2,v1:0..5")


def _add_scoring_flags(parser: argparse.ArgumentParser, default_mode: str) -> None:
    parser.add_argument("--colors", type=int, default=10, help="color-scale bucket count")
    parser.add_argument("--bins", type=int, help="histogram bins (default: number of sites)")
    parser.add_argument("--window", type=int, default=1, help="bins per window")
    parser.add_argument("--kind", choices=HISTOGRAM_KINDS, default=EQUAL_WIDTH)
    parser.add_argument("--mode", choices=MODES, default=default_mode)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repscape", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, required=True, help="number of regions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mixture", help="mixture spec JSON path (default: built-in clustered preset)")
    p.add_argument("--components", type=int, default=3, help="preset component count")
    p.add_argument("--n-variables", type=int, default=3, help="preset variable count")

    p = sub.add_parser("representativeness", help="score a given sample set")
    _add_analysis_flags(p)
    p.add_argument("--samples", required=True, help="sample CSV: region_id list or full rows")
    _add_scoring_flags(p, MODE_HEAT)
    p.add_argument("--out-report", help="report JSON path")
    p.add_argument("--out-heatmap", help="heat-map document JSON path")
    p.add_argument("--out-raster", help="heat-map PPM path")
    p.add_argument("--out-markers", help="marker list CSV path")
    p.add_argument("--raster-size", default="720x360", help="WxH for --out-raster")

    p = sub.add_parser("ideal", help="select ideal sites and score them")
    _add_analysis_flags(p)
    p.add_argument("--n", type=int, required=True, help="requested site count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--median", action="store_true", help="deterministic median member per bucket")
    _add_scoring_flags(p, MODE_WINDOW)
    p.add_argument("--out-sites", help="centroid CSV path")
    p.add_argument("--out-report", help="report JSON path")
    p.add_argument("--out-heatmap", help="heat-map document JSON path")

    p = sub.add_parser("baseline", help="random-sampling baseline")
    _add_analysis_flags(p)
    p.add_argument("--n", type=int, required=True, help="sites per trial")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_scoring_flags(p, MODE_HEAT)
    p.add_argument("--compare-r", help="comma-separated R values to place as percentiles")
    p.add_argument("--out", help="baseline JSON path")

    p = sub.add_parser("sweep", help="R trend over site count or bin count")
    _add_analysis_flags(p)
    p.add_argument("--axis", choices=("centroids", "bins"), required=True)
    p.add_argument("--values", required=True, help="comma-separated ascending axis values")
    p.add_argument("--windows", default="1", help="window sizes for the bins axis")
    p.add_argument("--n", type=int, help="fixed site count (bins axis)")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    _add_scoring_flags(p, MODE_HEAT)
    p.add_argument("--out-json", help="sweep JSON path")
    p.add_argument("--out-csv", help="sweep CSV path")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, help=f"port (env REPSCAPE_PORT, default {DEFAULT_PORT})")

    return parser


def _load_analysis(args):
    source = ingest_csv(args.data)
    variables = (
        [v.strip() for v in args.variables.split(",") if v.strip()] if args.variables else None
    )
    filters = parse_filter_spec(args.filters) if args.filters else []
    return prepare_analysis(source, variables, filters)


def _load_samples(analysis, path: str):
    """Sample CSV: either a single region_id column or full dataset rows."""
    text = Path(path).read_text(encoding="utf-8")
    header = text.splitlines()[0].strip() if text.strip() else ""
    if header == "region_id":
        ids = [line.strip() for line in text.splitlines()[1:] if line.strip()]
        return resolve_samples(analysis, ids=ids)
    external = ingest_csv(text)
    points = [
        {
            "id": region.id,
            "lat": region.lat,
            "lon": region.lon,
            "values": dict(zip(external.variable_names, external.values[i])),
        }
        for i, region in enumerate(external.regions)
    ]
    return resolve_samples(analysis, points=points)


def _write_json(path: str, payload) -> None:
    _serialize.write_text_atomic(path, _serialize.dumps(payload))


def _parse_raster_size(spec: str) -> tuple[int, int]:
    try:
        w, h = spec.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ValidationError(f"bad raster size {spec!r}: expected WxH") from None


def _cmd_synth(args) -> int:
    if args.mixture:
        import json

        mixture = MixtureSpec.from_payload(json.loads(Path(args.mixture).read_text()))
    else:
        k = args.components
        mixture = clustered_mixture(
            weights=[1.0 / k] * k,
            positions=[10.0 * j / max(k - 1, 1) for j in range(k)],
            widths=[0.5] * k,
            n_variables=args.n_variables,
        )
    dataset = generate_synthetic(mixture, args.n, args.seed)
    _serialize.write_text_atomic(args.out, write_csv(dataset))
    return EXIT_OK


def _cmd_representativeness(args) -> int:
    analysis = _load_analysis(args)
    samples = _load_samples(analysis, args.samples)
    run = score_samples(
        analysis,
        samples,
        ColorScale(args.colors),
        mode=args.mode,
        bins=args.bins,
        window=args.window,
        kind=args.kind,
    )
    payload = run.payloads()
    if args.out_report:
        _write_json(args.out_report, payload["report"])
    if args.out_heatmap:
        _write_json(args.out_heatmap, payload["heatmap"])
    if args.out_markers:
        _serialize.write_text_atomic(args.out_markers, markers_csv(run.heatmap))
    if args.out_raster:
        w, h = _parse_raster_size(args.raster_size)
        _serialize.write_bytes_atomic(args.out_raster, render_raster(run.heatmap, w, h))
    print(f"R={run.report.r:.6f}")
    return EXIT_OK


def _cmd_ideal(args) -> int:
    analysis = _load_analysis(args)
    cfg = SelectionConfig(
        n_sites=args.n,
        bins=default_bins(args.mode, args.bins, args.n),
        window=args.window,
        seed=args.seed,
        kind=args.kind,
        median=args.median,
    )
    run = run_ideal(analysis, cfg, ColorScale(args.colors), mode=args.mode)
    payload = run.payloads()
    if run.selection.truncated:
        print(
            f"warning: only {len(run.selection.indices)} of {args.n} sites available "
            "(every non-empty window is used)",
            file=sys.stderr,
        )
    if args.out_sites:
        _serialize.write_text_atomic(args.out_sites, sites_csv(payload["sites"]))
    if args.out_report:
        _write_json(args.out_report, payload["report"])
    if args.out_heatmap:
        _write_json(args.out_heatmap, payload["heatmap"])
    print(f"R={run.scored.report.r:.6f}")
    return EXIT_OK


def _cmd_baseline(args) -> int:
    analysis = _load_analysis(args)
    compare = (
        [float(tok) for tok in args.compare_r.split(",") if tok.strip()]
        if args.compare_r
        else []
    )
    payload = run_baseline(
        analysis,
        n_sites=args.n,
        trials=args.trials,
        seed=args.seed,
        scale=ColorScale(args.colors),
        mode=args.mode,
        bins=args.bins,
        window=args.window,
        kind=args.kind,
        compare_r=compare,
    )
    if args.out:
        _write_json(args.out, payload)
    print(f"mean_R={payload['mean_r']:.6f}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    from .experiments import sweep_bins, sweep_centroids

    analysis = _load_analysis(args)
    values = [int(tok) for tok in args.values.split(",") if tok.strip()]
    scale = ColorScale(args.colors)
    if args.axis == "centroids":
        cfg = SelectionConfig(
            n_sites=values[0],
            bins=args.bins if args.bins else max(values),
            window=args.window,
            seed=args.seed,
            kind=args.kind,
        )
        result = sweep_centroids(analysis, values, cfg, args.trials, scale, mode=args.mode)
        payload = result.to_payload()
        csv_text = result.to_csv()
    else:
        if not args.n:
            raise ValidationError("--n is required for the bins axis")
        windows = [int(tok) for tok in args.windows.split(",") if tok.strip()]
        cfg = SelectionConfig(
            n_sites=args.n,
            bins=values[0],
            window=1,
            seed=args.seed,
            kind=args.kind,
        )
        results = sweep_bins(
            analysis, values, windows, cfg, scale, mode=args.mode, trials=args.trials
        )
        payload = {"sweeps": [r.to_payload() for r in results]}
        csv_text = "window," + results[0].to_csv().splitlines()[0] + "\n"
        for w, result in zip(windows, results):
            for line in result.to_csv().splitlines()[1:]:
                csv_text += f"{w},{line}\n"
    if args.out_json:
        _write_json(args.out_json, payload)
    if args.out_csv:
        _serialize.write_text_atomic(args.out_csv, csv_text)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port
    if port is None:
        port = int(os.environ.get("REPSCAPE_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(), host=args.host, port=port)
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "representativeness": _cmd_representativeness,
    "ideal": _cmd_ideal,
    "baseline": _cmd_baseline,
    "sweep": _cmd_sweep,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except COMPUTE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RepscapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

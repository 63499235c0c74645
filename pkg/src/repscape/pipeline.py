"""Shared orchestration: one code path from a raw dataset to reports.

Both the CLI and the HTTP service run through these helpers, so for
identical logical inputs they produce identical numbers (and identical
JSON bytes, since both serialize through :mod:`repscape._serialize`).

Pipeline order: filter (native units, full variable set) -> select the
analysis variables -> min-max normalize -> fit the principal axis ->
project. Sample ids are resolved against the full pre-filter dataset, so
sites excluded by a filter still project through the fitted model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dataset import Dataset, FilterPredicate, apply_filter, normalize_columns
from .errors import UnknownRegionError, ValidationError
from .heatmap import FilteredCell, HeatMapDocument, build_document
from .histogram import EQUAL_WIDTH, Histogram, WindowPartition, build_histogram
from .pca import PrincipalAxisProjector, Projection
from .representativeness import (
    MODE_HEAT,
    MODE_WINDOW,
    METHOD_GIVEN,
    METHOD_IDEAL,
    ColorScale,
    RepresentativenessReport,
    SampleSet,
    SampleSite,
    build_report,
    make_index_scorer,
)
from .selection import (
    BaselineResult,
    SelectionConfig,
    SelectionResult,
    percentile_of,
    random_baseline,
    select_ideal,
)


@dataclass(frozen=True)
class Analysis:
    """A fitted view of one dataset under a variable subset and filters."""

    source: Dataset           # full dataset, native units, all variables
    unfiltered: Dataset       # full rows, analysis variables, native units
    native: Dataset           # filtered rows, analysis variables, native units
    data: Dataset             # filtered rows, analysis variables, normalized
    projector: PrincipalAxisProjector
    projection: Projection
    excluded: tuple[FilteredCell, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return self.data.variable_names


def prepare_analysis(
    source: Dataset,
    variables: Sequence[str] | None = None,
    filters: Sequence[FilterPredicate] = (),
) -> Analysis:
    """Filter, normalize and fit the projection model for one request."""
    names = tuple(variables) if variables else source.variable_names
    filtered = apply_filter(source, filters)
    native = filtered.select_variables(names)
    data = normalize_columns(native)
    projector = PrincipalAxisProjector().fit(data.values, feature_names=names)
    projection = projector.project(data.values)
    kept = set(native.ids)
    excluded = tuple(
        FilteredCell(r.id, r.lat, r.lon) for r in source.regions if r.id not in kept
    )
    return Analysis(
        source=source,
        unfiltered=source.select_variables(names),
        native=native,
        data=data,
        projector=projector,
        projection=projection,
        excluded=excluded,
    )


# -- sample resolution ----------------------------------------------------


def resolve_sample_ids(analysis: Analysis, ids: Sequence[str]) -> list[SampleSite]:
    """Resolve region ids (pre-filter rows included) to scored sites.

    Ids that survived the filter reuse the row's projection score exactly;
    filtered-out ids are normalized with the analysis scaling and projected
    through the fitted model.
    """
    scaling = analysis.data.normalization
    sites = []
    for rid in ids:
        row = analysis.source.row_of(rid)
        region = analysis.source.regions[row]
        if analysis.data.has_region(rid):
            kept_row = analysis.data.row_of(rid)
            score = float(analysis.projection.values[kept_row])
            sites.append(SampleSite(rid, region.lat, region.lon, score, region_index=kept_row))
        else:
            normalized = scaling.apply(analysis.unfiltered.values[row])
            score = float(analysis.projector.scores(normalized[np.newaxis, :])[0])
            sites.append(SampleSite(rid, region.lat, region.lon, score, region_index=None))
    return sites


def resolve_external_points(
    analysis: Analysis, points: Sequence[Mapping]
) -> list[SampleSite]:
    """Resolve external points carrying lat/lon and every fitted variable."""
    scaling = analysis.data.normalization
    sites = []
    for i, point in enumerate(points):
        try:
            lat = float(point["lat"])
            lon = float(point["lon"])
            values = point["values"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"external point {i}: missing {exc}") from exc
        label = str(point.get("id", f"point-{i}"))
        try:
            row = np.array([float(values[name]) for name in analysis.variables])
        except KeyError as exc:
            raise ValidationError(
                f"external point {label!r} lacks a value for variable {exc}"
            ) from None
        normalized = scaling.apply(row)
        score = float(analysis.projector.scores(normalized[np.newaxis, :])[0])
        sites.append(SampleSite(label, lat, lon, score, region_index=None))
    return sites


def resolve_samples(
    analysis: Analysis,
    ids: Sequence[str] = (),
    points: Sequence[Mapping] = (),
) -> SampleSet:
    sites = resolve_sample_ids(analysis, ids) + resolve_external_points(analysis, points)
    if not sites:
        raise ValidationError("sample set must contain at least one entry")
    return SampleSet(tuple(sites))


def sample_set_from_rows(analysis: Analysis, indices: Sequence[int]) -> SampleSet:
    """Wrap filtered-dataset row indices (e.g. selection output) as samples."""
    sites = []
    for idx in np.asarray(indices, dtype=np.intp):
        region = analysis.native.regions[idx]
        sites.append(
            SampleSite(
                region.id,
                region.lat,
                region.lon,
                float(analysis.projection.values[idx]),
                region_index=int(idx),
            )
        )
    return SampleSet(tuple(sites))


# -- request-level runs ----------------------------------------------------


def default_bins(mode: str, bins: int | None, n_sites: int) -> int:
    """Bin count defaults to the number of sites when not specified."""
    if bins is not None:
        if bins < 1:
            raise ValidationError("bins must be >= 1")
        return bins
    return max(n_sites, 1)


@dataclass(frozen=True)
class ScoredRun:
    """A scored sample set with its displayable artifacts."""

    analysis: Analysis
    samples: SampleSet
    report: RepresentativenessReport
    heatmap: HeatMapDocument
    hist: Histogram | None
    windows: WindowPartition | None

    def payloads(self) -> dict:
        return {
            "R": self.report.r,
            "mode": self.report.mode,
            "method": self.report.method,
            "explained_variance": self.analysis.projector.explained_variance_ratio().tolist(),
            "report": self.report.to_payload(),
            "heatmap": self.heatmap.to_payload(),
        }


def score_samples(
    analysis: Analysis,
    samples: SampleSet,
    scale: ColorScale,
    mode: str = MODE_HEAT,
    bins: int | None = None,
    window: int = 1,
    kind: str = EQUAL_WIDTH,
    method: str = METHOD_GIVEN,
) -> ScoredRun:
    """Workflow for a user-supplied sample set: score, bucket, map."""
    hist = None
    windows = None
    if mode == MODE_WINDOW:
        n_bins = default_bins(mode, bins, len(samples.sites))
        hist = build_histogram(analysis.projection, n_bins, kind)
        windows = WindowPartition(n_bins, window)
    report = build_report(
        analysis.data.ids,
        analysis.data.lats,
        analysis.data.lons,
        analysis.projection,
        samples,
        scale,
        mode=mode,
        method=method,
        hist=hist,
        windows=windows,
    )
    doc = build_document(report, samples, analysis.excluded, scale)
    return ScoredRun(analysis, samples, report, doc, hist, windows)


@dataclass(frozen=True)
class IdealRun:
    """Result of the greedy ideal-site workflow, scored like a sample set."""

    scored: ScoredRun
    selection: SelectionResult
    config: SelectionConfig

    def sites_rows(self) -> list[dict]:
        rows = []
        for site, (bucket, _) in zip(self.scored.samples.sites, self.selection.trace):
            rows.append(
                {
                    "region_id": site.id,
                    "lat": site.lat,
                    "lon": site.lon,
                    "pc1_score": site.score,
                    "bucket": bucket,
                }
            )
        return rows

    def payloads(self) -> dict:
        payload = self.scored.payloads()
        payload["truncated"] = self.selection.truncated
        payload["sites"] = self.sites_rows()
        payload["seed"] = self.config.seed
        return payload


def run_ideal(
    analysis: Analysis,
    cfg: SelectionConfig,
    scale: ColorScale,
    mode: str = MODE_WINDOW,
) -> IdealRun:
    """Workflow for generated sites: select greedily, then score the set."""
    hist = build_histogram(analysis.projection, cfg.bins, cfg.kind)
    windows = WindowPartition(cfg.bins, cfg.window)
    selection = select_ideal(hist, windows, cfg)
    samples = sample_set_from_rows(analysis, selection.indices)
    report = build_report(
        analysis.data.ids,
        analysis.data.lats,
        analysis.data.lons,
        analysis.projection,
        samples,
        scale,
        mode=mode,
        method=METHOD_IDEAL,
        hist=hist,
        windows=windows,
    )
    doc = build_document(report, samples, analysis.excluded, scale)
    scored = ScoredRun(analysis, samples, report, doc, hist, windows)
    return IdealRun(scored=scored, selection=selection, config=cfg)


def run_baseline(
    analysis: Analysis,
    n_sites: int,
    trials: int,
    seed: int,
    scale: ColorScale,
    mode: str = MODE_HEAT,
    bins: int | None = None,
    window: int = 1,
    kind: str = EQUAL_WIDTH,
    compare_r: Sequence[float] = (),
) -> dict:
    """Random-sampling baseline plus percentile placement of supplied Rs."""
    hist = None
    windows = None
    if mode == MODE_WINDOW:
        n_bins = default_bins(mode, bins, n_sites)
        hist = build_histogram(analysis.projection, n_bins, kind)
        windows = WindowPartition(n_bins, window)
    scorer = make_index_scorer(analysis.projection, scale, mode, hist, windows)
    baseline = random_baseline(analysis.data.n_regions, n_sites, trials, seed, scorer)
    payload = baseline.to_payload()
    payload["mode"] = mode
    payload["percentiles"] = [percentile_of(baseline, float(r)) for r in compare_r]
    return payload


def sites_csv(rows: Sequence[Mapping]) -> str:
    """Centroid export: region_id, lat, lon, pc1_score, bucket."""
    lines = ["region_id,lat,lon,pc1_score,bucket"]
    for row in rows:
        lines.append(
            f"{row['region_id']},{repr(float(row['lat']))},{repr(float(row['lon']))},"
            f"{repr(float(row['pc1_score']))},{int(row['bucket'])}"
        )
    return "\n".join(lines) + "\n"

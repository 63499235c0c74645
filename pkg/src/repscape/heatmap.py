"""World heat-map documents and a simple deterministic raster renderer.

The document is the structured form consumed by UIs: one colored cell per
analyzed region, markers for the sample sites, a legend covering [0, 1],
and the regions excluded by filters in a reserved color (dark blue, as on
the classic filtered-world maps). The raster is a binary PPM (P6) in an
equirectangular projection with nearest-cell coloring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ValidationError
from .representativeness import ColorScale, RepresentativenessReport, SampleSet

FILTERED_COLOR = "#00008b"
MARKER_COLOR = "#000000"
MARKER_RADIUS = 2


@dataclass(frozen=True)
class HeatMapCell:
    id: str
    lat: float
    lon: float
    bucket: int
    nfd: float


@dataclass(frozen=True)
class FilteredCell:
    id: str
    lat: float
    lon: float


@dataclass(frozen=True)
class LegendEntry:
    color: str
    lo: float
    hi: float


@dataclass(frozen=True)
class HeatMapDocument:
    cells: tuple[HeatMapCell, ...]
    markers: tuple[tuple[float, float], ...]
    legend: tuple[LegendEntry, ...]
    filtered: tuple[FilteredCell, ...] = ()
    filtered_color: str = FILTERED_COLOR

    def to_payload(self) -> dict:
        return {
            "cells": [
                {"id": c.id, "lat": c.lat, "lon": c.lon, "bucket": c.bucket, "nfd": c.nfd}
                for c in self.cells
            ],
            "markers": [{"lat": lat, "lon": lon} for lat, lon in self.markers],
            "legend": [{"color": e.color, "lo": e.lo, "hi": e.hi} for e in self.legend],
            "filtered": [{"id": c.id, "lat": c.lat, "lon": c.lon} for c in self.filtered],
            "filtered_color": self.filtered_color,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "HeatMapDocument":
        try:
            return cls(
                cells=tuple(
                    HeatMapCell(c["id"], c["lat"], c["lon"], c["bucket"], c["nfd"])
                    for c in payload["cells"]
                ),
                markers=tuple((m["lat"], m["lon"]) for m in payload["markers"]),
                legend=tuple(
                    LegendEntry(e["color"], e["lo"], e["hi"]) for e in payload["legend"]
                ),
                filtered=tuple(
                    FilteredCell(c["id"], c["lat"], c["lon"]) for c in payload["filtered"]
                ),
                filtered_color=payload["filtered_color"],
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad heat map document: {exc}") from exc


def legend_for(scale: ColorScale) -> tuple[LegendEntry, ...]:
    """One legend entry per bucket; boundaries at exactly i / bucket_count."""
    n = scale.bucket_count
    return tuple(
        LegendEntry(scale.palette[i], i / n, (i + 1) / n) for i in range(n)
    )


def build_document(
    report: RepresentativenessReport,
    samples: SampleSet | None,
    excluded: tuple[FilteredCell, ...] | list,
    scale: ColorScale,
) -> HeatMapDocument:
    """Assemble the displayable document from a finished report."""
    cells = tuple(
        HeatMapCell(
            report.region_ids[i],
            float(report.lats[i]),
            float(report.lons[i]),
            int(report.buckets[i]),
            float(report.nfd[i]),
        )
        for i in range(report.n_regions)
    )
    markers = samples.marker_coords if samples is not None else ()
    filtered = tuple(
        c if isinstance(c, FilteredCell) else FilteredCell(*c) for c in excluded
    )
    return HeatMapDocument(cells=cells, markers=markers, legend=legend_for(scale), filtered=filtered)


def _hex_rgb(color: str) -> tuple[int, int, int]:
    color = color.lstrip("#")
    return int(color[0:2], 16), int(color[2:4], 16), int(color[4:6], 16)


def _to_pixels(lats: np.ndarray, lons: np.ndarray, width: int, height: int):
    x = np.clip(((lons + 180.0) / 360.0 * width).astype(np.intp), 0, width - 1)
    y = np.clip(((90.0 - lats) / 180.0 * height).astype(np.intp), 0, height - 1)
    return x, y


def render_raster(doc: HeatMapDocument, width: int, height: int) -> bytes:
    """Render the document to a binary PPM (P6) image.

    Equirectangular projection (lon -> x, lat -> y, both linear). Each
    pixel takes the color of its nearest cell; sample markers are drawn
    last as fixed-size black dots. Output is deterministic byte-for-byte.
    """
    if width < 1 or height < 1:
        raise ValidationError("raster dimensions must be >= 1")
    legend_colors = [_hex_rgb(e.color) for e in doc.legend]
    all_lat = np.array([c.lat for c in doc.cells] + [c.lat for c in doc.filtered])
    all_lon = np.array([c.lon for c in doc.cells] + [c.lon for c in doc.filtered])
    colors = np.array(
        [legend_colors[c.bucket] for c in doc.cells]
        + [_hex_rgb(doc.filtered_color)] * len(doc.filtered),
        dtype=np.uint8,
    )
    if len(all_lat) == 0:
        raise ValidationError("document has no cells to render")

    px, py = _to_pixels(all_lat, all_lon, width, height)
    pixel_id = py * width + px

    # several cells can share a pixel: keep the one closest to the pixel
    # center, breaking ties by cell order
    cx = (px + 0.5) * (360.0 / width) - 180.0
    cy = 90.0 - (py + 0.5) * (180.0 / height)
    d2 = (all_lon - cx) ** 2 + (all_lat - cy) ** 2
    order = np.lexsort((np.arange(len(all_lat)), d2, pixel_id))
    ordered_ids = pixel_id[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = ordered_ids[1:] != ordered_ids[:-1]
    winners = order[first]

    image = np.zeros((height, width, 3), dtype=np.uint8)
    filled = np.zeros((height, width), dtype=bool)
    image[py[winners], px[winners]] = colors[winners]
    filled[py[winners], px[winners]] = True

    if not filled.all():
        # nearest painted pixel fills the gaps (deterministic EDT)
        _, (iy, ix) = ndimage.distance_transform_edt(~filled, return_indices=True)
        image = image[iy, ix]

    marker_rgb = np.array(_hex_rgb(MARKER_COLOR), dtype=np.uint8)
    if doc.markers:
        mlat = np.array([m[0] for m in doc.markers])
        mlon = np.array([m[1] for m in doc.markers])
        mx, my = _to_pixels(mlat, mlon, width, height)
        for x0, y0 in zip(mx, my):
            x_lo, x_hi = max(x0 - MARKER_RADIUS, 0), min(x0 + MARKER_RADIUS, width - 1)
            y_lo, y_hi = max(y0 - MARKER_RADIUS, 0), min(y0 + MARKER_RADIUS, height - 1)
            image[y_lo: y_hi + 1, x_lo: x_hi + 1] = marker_rgb

    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + image.tobytes()


def markers_csv(doc: HeatMapDocument) -> str:
    """Sample-site marker list as a small CSV."""
    lines = ["lat,lon"]
    lines.extend(f"{repr(lat)},{repr(lon)}" for lat, lon in doc.markers)
    return "\n".join(lines) + "\n"

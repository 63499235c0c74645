"""HTTP/JSON service exposing the pipeline over in-memory dataset snapshots.

All endpoints live under /v1. Datasets are immutable once uploaded, so
concurrent requests against one handle never interfere; fitted models are
cached per (handle, variables, filters) to keep interactive use snappy.
Every response is rendered through the same canonical JSON writer as the
CLI artifacts, and every error body carries a machine-readable ``code``
plus a human ``message``.
"""

from __future__ import annotations

import itertools
import threading
from datetime import datetime, timezone

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pydantic import BaseModel, Field

from . import _serialize
from .dataset import Dataset, FilterPredicate, ingest_csv, parse_filter_spec
from .errors import (
    COMPUTE_ERRORS,
    DATA_ERRORS,
    IngestError,
    RepscapeError,
    ValidationError,
)
from .histogram import EQUAL_WIDTH, build_histogram
from .pipeline import (
    Analysis,
    default_bins,
    prepare_analysis,
    resolve_samples,
    run_baseline,
    run_ideal,
    score_samples,
)
from .representativeness import MODE_HEAT, MODE_WINDOW, ColorScale
from .selection import SelectionConfig


class DatasetStore:
    """Process-lifetime map of handle id -> immutable dataset snapshot."""

    def __init__(self):
        self._lock = threading.Lock()
        self._datasets: dict[str, tuple[Dataset, str]] = {}
        self._counter = itertools.count(1)

    def add(self, dataset: Dataset) -> tuple[str, str]:
        loaded_at = datetime.now(timezone.utc).isoformat()
        with self._lock:
            handle = f"ds-{next(self._counter):06d}"
            self._datasets[handle] = (dataset, loaded_at)
        return handle, loaded_at

    def get(self, handle: str) -> Dataset:
        try:
            return self._datasets[handle][0]
        except KeyError:
            raise LookupError(handle) from None

    def drop(self, handle: str) -> None:
        with self._lock:
            if handle not in self._datasets:
                raise LookupError(handle)
            del self._datasets[handle]


class FilterBody(BaseModel):
    variable: str
    lo: float
    hi: float


class SamplesBody(BaseModel):
    ids: list[str] = Field(default_factory=list)
    points: list[dict] = Field(default_factory=list)


class ScaleBody(BaseModel):
    buckets: int = 10


class RepresentativenessBody(BaseModel):
    variables: list[str] | None = None
    filters: list[FilterBody] = Field(default_factory=list)
    samples: SamplesBody
    scale: ScaleBody = Field(default_factory=ScaleBody)
    bins: int | None = None
    window: int = 1
    kind: str = EQUAL_WIDTH
    mode: str = MODE_HEAT


class IdealBody(BaseModel):
    variables: list[str] | None = None
    filters: list[FilterBody] = Field(default_factory=list)
    n_sites: int
    bins: int | None = None
    window: int = 1
    seed: int = 0
    kind: str = EQUAL_WIDTH
    median: bool = False
    scale: ScaleBody = Field(default_factory=ScaleBody)
    mode: str = MODE_WINDOW


class BaselineBody(BaseModel):
    variables: list[str] | None = None
    filters: list[FilterBody] = Field(default_factory=list)
    n_sites: int
    trials: int
    seed: int = 0
    bins: int | None = None
    window: int = 1
    kind: str = EQUAL_WIDTH
    scale: ScaleBody = Field(default_factory=ScaleBody)
    mode: str = MODE_HEAT
    compare_r: list[float] = Field(default_factory=list)


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=_serialize.dumps(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error_response(code: str, message: str, status_code: int) -> Response:
    return _json_response({"code": code, "message": message}, status_code)


def create_app() -> FastAPI:
    app = FastAPI(title="repscape", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = DatasetStore()
    app.state.store = store
    model_cache: dict[tuple, Analysis] = {}

    def analysis_for(
        handle: str, variables: list[str] | None, filters: list[FilterBody]
    ) -> Analysis:
        dataset = store.get(handle)
        predicates = tuple(FilterPredicate(f.variable, f.lo, f.hi) for f in filters)
        key = (handle, tuple(variables) if variables else None, predicates)
        cached = model_cache.get(key)
        if cached is not None:
            return cached
        analysis = prepare_analysis(dataset, variables, predicates)
        model_cache[key] = analysis  # last writer wins; values are idempotent
        return analysis

    @app.exception_handler(RepscapeError)
    async def repscape_error(_request: Request, exc: RepscapeError):
        if isinstance(exc, IngestError):
            status = 400
        elif isinstance(exc, DATA_ERRORS + COMPUTE_ERRORS + (ValidationError,)):
            status = 422
        else:
            status = 400
        return _error_response(exc.code, str(exc), status)

    @app.exception_handler(LookupError)
    async def unknown_handle(_request: Request, exc: LookupError):
        return _error_response("unknown_dataset", f"unknown dataset handle {exc.args[0]!r}", 404)

    @app.exception_handler(RequestValidationError)
    async def bad_body(_request: Request, exc: RequestValidationError):
        return _error_response("validation", str(exc.errors()), 422)

    @app.post("/v1/datasets")
    async def upload_dataset(request: Request):
        content_type = request.headers.get("content-type", "").split(";")[0].strip()
        if content_type not in ("text/csv", "application/csv"):
            return _error_response(
                "unsupported_media_type", "dataset uploads must be text/csv", 415
            )
        body = await request.body()
        dataset = ingest_csv(body)
        handle, loaded_at = store.add(dataset)
        return _json_response(
            {
                "id": handle,
                "rows": dataset.n_regions,
                "variables": list(dataset.variable_names),
                "loaded_at": loaded_at,
            },
            201,
        )

    @app.delete("/v1/datasets/{handle}")
    def delete_dataset(handle: str):
        store.drop(handle)
        return Response(status_code=204)

    @app.post("/v1/datasets/{handle}/representativeness")
    def representativeness(handle: str, body: RepresentativenessBody):
        analysis = analysis_for(handle, body.variables, body.filters)
        samples = resolve_samples(analysis, body.samples.ids, body.samples.points)
        run = score_samples(
            analysis,
            samples,
            ColorScale(body.scale.buckets),
            mode=body.mode,
            bins=body.bins,
            window=body.window,
            kind=body.kind,
        )
        return _json_response(run.payloads())

    @app.post("/v1/datasets/{handle}/ideal-sites")
    def ideal_sites(handle: str, body: IdealBody):
        analysis = analysis_for(handle, body.variables, body.filters)
        cfg = SelectionConfig(
            n_sites=body.n_sites,
            bins=default_bins(body.mode, body.bins, body.n_sites),
            window=body.window,
            seed=body.seed,
            kind=body.kind,
            median=body.median,
        )
        run = run_ideal(analysis, cfg, ColorScale(body.scale.buckets), mode=body.mode)
        return _json_response(run.payloads())

    @app.post("/v1/datasets/{handle}/baseline")
    def baseline(handle: str, body: BaselineBody):
        analysis = analysis_for(handle, body.variables, body.filters)
        payload = run_baseline(
            analysis,
            n_sites=body.n_sites,
            trials=body.trials,
            seed=body.seed,
            scale=ColorScale(body.scale.buckets),
            mode=body.mode,
            bins=body.bins,
            window=body.window,
            kind=body.kind,
            compare_r=body.compare_r,
        )
        return _json_response(payload)

    @app.get("/v1/datasets/{handle}/histogram")
    def histogram(
        handle: str,
        bins: int,
        variables: str | None = None,
        filters: str | None = None,
        kind: str = EQUAL_WIDTH,
    ):
        names = [v.strip() for v in variables.split(",") if v.strip()] if variables else None
        predicates = parse_filter_spec(filters) if filters else []
        analysis = analysis_for(
            handle,
            names,
            [FilterBody(variable=p.variable, lo=p.lo, hi=p.hi) for p in predicates],
        )
        hist = build_histogram(analysis.projection, bins, kind)
        return _json_response(hist.to_payload())

    return app


app = create_app()

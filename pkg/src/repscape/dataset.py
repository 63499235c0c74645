"""Region/variable tables: CSV ingest, range filters, min-max normalization,
and a synthetic Gaussian-mixture grid generator.

A :class:`Dataset` is an immutable row-major matrix (rows = regions,
columns = variables) plus per-region coordinates. Filtering always happens
in native units and precedes normalization; every downstream stage
(projection, histograms, scoring) consumes the normalized matrix.

CSV format (the one wire format this module owns)::

    region_id,lat,lon,<var1>,<var2>,...
    a,12.5,-70.25,3.0,0.41,...

Comma separator, ``.`` decimal point, LF line endings (CR tolerated),
no quoting; region ids must not contain commas.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._serialize import fmt_float
from .errors import (
    EmptyFilterError,
    IngestError,
    UnknownRegionError,
    UnknownVariableError,
    ValidationError,
)

CSV_BASE_COLUMNS = ("region_id", "lat", "lon")

VARIABLE_KINDS = ("continuous", "categorical")


@dataclass(frozen=True)
class Region:
    """One grid cell of the world: an id plus its center coordinates."""

    id: str
    lat: float
    lon: float


@dataclass(frozen=True)
class VariableSpec:
    name: str
    kind: str = "continuous"
    declared_range: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.name:
            raise ValidationError("variable name must be non-empty")
        if self.kind not in VARIABLE_KINDS:
            raise ValidationError(f"variable kind must be one of {VARIABLE_KINDS}, got {self.kind!r}")
        if self.declared_range is not None:
            lo, hi = self.declared_range
            if not lo < hi:
                raise ValidationError(f"declared_range for {self.name!r} must satisfy min < max")


@dataclass(frozen=True)
class FilterPredicate:
    """Inclusive native-unit range on one variable; predicates conjoin."""

    variable: str
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValidationError(f"filter on {self.variable!r}: lo must be <= hi")


@dataclass(frozen=True)
class ColumnScaling:
    """Per-column (min, max) captured when a dataset was normalized.

    Columns where min == max are degenerate: they normalize to all zeros
    and are flagged rather than rejected.
    """

    mins: np.ndarray
    maxs: np.ndarray

    @property
    def spans(self) -> np.ndarray:
        return self.maxs - self.mins

    @property
    def degenerate(self) -> np.ndarray:
        """Boolean mask of constant (zero-span) columns."""
        return self.spans == 0.0

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Map native values into [0, 1] column-wise; constant columns map to 0."""
        safe = np.where(self.spans == 0.0, 1.0, self.spans)
        return (np.asarray(values, dtype=np.float64) - self.mins) / safe

    def invert(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=np.float64) * self.spans + self.mins


class Dataset:
    """Immutable region x variable matrix, in native or normalized units."""

    def __init__(
        self,
        regions: Sequence[Region],
        variables: Sequence[VariableSpec],
        values,
        normalization: ColumnScaling | None = None,
    ):
        regions = tuple(regions)
        variables = tuple(variables)
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2 or values.shape != (len(regions), len(variables)):
            raise ValidationError(
                f"value matrix must be {len(regions)}x{len(variables)}, got {values.shape}"
            )
        if len(regions) == 0:
            raise ValidationError("dataset must contain at least one region")
        if len(variables) == 0:
            raise ValidationError("dataset must contain at least one variable")
        if not np.all(np.isfinite(values)):
            raise ValidationError("value matrix contains non-finite entries")

        seen: set[str] = set()
        for r in regions:
            if not r.id or "," in r.id:
                raise ValidationError(f"invalid region id {r.id!r}")
            if r.id in seen:
                raise ValidationError(f"duplicate region id {r.id!r}")
            seen.add(r.id)
            if not -90.0 <= r.lat <= 90.0:
                raise ValidationError(f"region {r.id!r}: lat {r.lat} out of [-90, 90]")
            if not -180.0 <= r.lon < 180.0:
                raise ValidationError(f"region {r.id!r}: lon {r.lon} out of [-180, 180)")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValidationError("variable names must be unique")
        if normalization is not None:
            if not (np.all(values >= 0.0) and np.all(values <= 1.0)):
                raise ValidationError("normalized dataset must hold values in [0, 1]")

        values.setflags(write=False)
        self.regions = regions
        self.variables = variables
        self.values = values
        self.normalization = normalization
        self._index = {r.id: i for i, r in enumerate(regions)}

    # -- introspection -------------------------------------------------

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.regions)

    @property
    def lats(self) -> np.ndarray:
        return np.array([r.lat for r in self.regions])

    @property
    def lons(self) -> np.ndarray:
        return np.array([r.lon for r in self.regions])

    def row_of(self, region_id: str) -> int:
        try:
            return self._index[region_id]
        except KeyError:
            raise UnknownRegionError(f"unknown region id {region_id!r}") from None

    def has_region(self, region_id: str) -> bool:
        return region_id in self._index

    def column_of(self, variable: str) -> int:
        try:
            return self.variable_names.index(variable)
        except ValueError:
            raise UnknownVariableError(f"unknown variable {variable!r}") from None

    # -- derivation ----------------------------------------------------

    def select_variables(self, names: Sequence[str]) -> "Dataset":
        """New dataset with the given variable columns, in the given order."""
        cols = [self.column_of(n) for n in names]
        scaling = self.normalization
        if scaling is not None:
            scaling = ColumnScaling(scaling.mins[cols], scaling.maxs[cols])
        return Dataset(
            self.regions,
            [self.variables[c] for c in cols],
            self.values[:, cols],
            scaling,
        )

    def take_rows(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(
            [self.regions[i] for i in indices],
            self.variables,
            self.values[indices],
            self.normalization,
        )

    def subsample(self, n: int, seed: int = 0) -> "Dataset":
        """Uniform row subsample of size n, original row order preserved."""
        if not 1 <= n <= self.n_regions:
            raise ValidationError(f"subsample size {n} out of [1, {self.n_regions}]")
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(self.n_regions, size=n, replace=False))
        return self.take_rows(keep)


# -- CSV ingest / export ------------------------------------------------


def _as_text(source) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        # paths never contain newlines; CSV text always does
        if "\n" in source:
            return source
        return Path(source).read_text(encoding="utf-8")
    if isinstance(source, bytes):
        return source.decode("utf-8")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def ingest_csv(source) -> Dataset:
    """Parse a ``region_id,lat,lon,<vars...>`` CSV into a native-unit Dataset.

    ``source`` may be a path, bytes, text, or a file-like object. Errors
    name the offending data row (1-based) and column.
    """
    try:
        text = _as_text(source)
    except OSError as exc:
        raise IngestError(f"cannot read source: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise IngestError(f"source is not valid UTF-8: {exc}") from exc

    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None:
        raise IngestError("empty source: missing header row")
    header = [h.strip() for h in header]
    if tuple(header[:3]) != CSV_BASE_COLUMNS:
        raise IngestError(f"header must start with {','.join(CSV_BASE_COLUMNS)}, got {header[:3]}")
    var_names = header[3:]
    if not var_names:
        raise IngestError("header declares no variable columns")
    if len(set(var_names)) != len(var_names):
        raise IngestError("duplicate variable names in header")

    regions: list[Region] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    for row_no, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and row[0].strip() == ""):
            continue
        if len(row) != len(header):
            raise IngestError(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
        rid = row[0].strip()
        if not rid:
            raise IngestError(f"row {row_no}, column 'region_id': empty id")
        if rid in seen:
            raise IngestError(f"row {row_no}, column 'region_id': duplicate id {rid!r}")
        seen.add(rid)
        lat = _parse_number(row[1], row_no, "lat")
        lon = _parse_number(row[2], row_no, "lon")
        if not -90.0 <= lat <= 90.0:
            raise IngestError(f"row {row_no}, column 'lat': {lat} out of [-90, 90]")
        if not -180.0 <= lon < 180.0:
            raise IngestError(f"row {row_no}, column 'lon': {lon} out of [-180, 180)")
        values = [_parse_number(tok, row_no, name) for tok, name in zip(row[3:], var_names)]
        regions.append(Region(rid, lat, lon))
        rows.append(values)

    if not rows:
        raise IngestError("no data rows")
    return Dataset(regions, [VariableSpec(n) for n in var_names], np.array(rows))


def _parse_number(token: str, row_no: int, column: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise IngestError(f"row {row_no}, column {column!r}: not numeric: {token!r}") from None
    if not math.isfinite(value):
        raise IngestError(f"row {row_no}, column {column!r}: non-finite value {token!r}")
    return value


def write_csv(dataset: Dataset, sink=None) -> str:
    """Serialize a dataset to the CSV format accepted by :func:`ingest_csv`.

    Floats use lossless shortest decimal form, so ingest(write(d)) == d.
    Returns the text; also writes it when ``sink`` is a path or file-like.
    """
    out = io.StringIO()
    out.write(",".join(CSV_BASE_COLUMNS + dataset.variable_names) + "\n")
    for i, region in enumerate(dataset.regions):
        cells = [region.id, fmt_float(region.lat), fmt_float(region.lon)]
        cells.extend(fmt_float(v) for v in dataset.values[i])
        out.write(",".join(cells) + "\n")
    text = out.getvalue()
    if sink is not None:
        if isinstance(sink, (str, Path)):
            Path(sink).write_text(text, encoding="utf-8")
        else:
            sink.write(text)
    return text


# -- filtering / normalization -------------------------------------------


def apply_filter(dataset: Dataset, predicates: Iterable[FilterPredicate]) -> Dataset:
    """Keep exactly the rows satisfying every predicate (inclusive bounds).

    Filters operate on native units, so the dataset must not be normalized
    yet. Raises EmptyFilterError when nothing survives.
    """
    if dataset.normalization is not None:
        raise ValidationError("filters use native units: apply before normalize_columns")
    predicates = list(predicates)
    if not predicates:
        return dataset
    mask = np.ones(dataset.n_regions, dtype=bool)
    for pred in predicates:
        col = dataset.column_of(pred.variable)
        column = dataset.values[:, col]
        mask &= (column >= pred.lo) & (column <= pred.hi)
    if not mask.any():
        raise EmptyFilterError("empty after filter: no region satisfies all predicates")
    return dataset.take_rows(np.flatnonzero(mask))


def normalize_columns(dataset: Dataset) -> Dataset:
    """Min-max scale every column into [0, 1], recording per-column (min, max).

    Constant columns map to all zeros and are flagged on the returned
    dataset's ``normalization.degenerate`` mask (a warning, not an error).
    """
    if dataset.normalization is not None:
        raise ValidationError("dataset is already normalized")
    mins = dataset.values.min(axis=0)
    maxs = dataset.values.max(axis=0)
    scaling = ColumnScaling(mins, maxs)
    return Dataset(dataset.regions, dataset.variables, scaling.apply(dataset.values), scaling)


def denormalize_columns(dataset: Dataset) -> Dataset:
    """Invert :func:`normalize_columns` using the recorded column scaling."""
    scaling = dataset.normalization
    if scaling is None:
        raise ValidationError("dataset is not normalized")
    return Dataset(dataset.regions, dataset.variables, scaling.invert(dataset.values), None)


def parse_filter_spec(spec: str) -> list[FilterPredicate]:
    """Parse the ``var:lo..hi[,var:lo..hi...]`` filter grammar."""
    predicates = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            variable, bounds = part.split(":", 1)
            lo_text, hi_text = bounds.split("..", 1)
            predicates.append(FilterPredicate(variable.strip(), float(lo_text), float(hi_text)))
        except ValueError:
            raise ValidationError(f"bad filter {part!r}: expected var:lo..hi") from None
    return predicates


# -- synthetic data -------------------------------------------------------


@dataclass(frozen=True)
class MixtureComponent:
    mean: tuple[float, ...]
    stddev: tuple[float, ...]
    weight: float


@dataclass(frozen=True)
class MixtureSpec:
    """Gaussian mixture over named variables, used by the synthetic generator."""

    variables: tuple[str, ...]
    components: tuple[MixtureComponent, ...]

    def __post_init__(self):
        if not self.variables:
            raise ValidationError("mixture needs at least one variable")
        if not self.components:
            raise ValidationError("mixture needs at least one component")
        m = len(self.variables)
        for i, c in enumerate(self.components):
            if len(c.mean) != m or len(c.stddev) != m:
                raise ValidationError(f"component {i}: mean/stddev must have {m} entries")
            if any(s < 0 for s in c.stddev):
                raise ValidationError(f"component {i}: stddev must be non-negative")
        total = sum(c.weight for c in self.components)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"component weights must sum to 1, got {total}")

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    def to_payload(self) -> dict:
        return {
            "variables": list(self.variables),
            "components": [
                {"mean": list(c.mean), "stddev": list(c.stddev), "weight": c.weight}
                for c in self.components
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "MixtureSpec":
        try:
            return cls(
                tuple(payload["variables"]),
                tuple(
                    MixtureComponent(tuple(c["mean"]), tuple(c["stddev"]), float(c["weight"]))
                    for c in payload["components"]
                ),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad mixture spec: {exc}") from exc


def sample_mixture(mixture: MixtureSpec, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n rows from the mixture. Returns (values, component labels)."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    rng = np.random.default_rng(seed)
    labels = rng.choice(len(mixture.components), size=n, p=mixture.weights)
    means = np.array([c.mean for c in mixture.components])
    stddevs = np.array([c.stddev for c in mixture.components])
    values = means[labels] + stddevs[labels] * rng.standard_normal((n, len(mixture.variables)))
    return values, labels


def grid_coordinates(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell-center lat/lon for n cells on a row-major equirectangular grid."""
    cols = int(math.ceil(math.sqrt(2.0 * n)))
    rows = int(math.ceil(n / cols))
    idx = np.arange(n)
    r = idx // cols
    c = idx % cols
    lat = 90.0 - (r + 0.5) * (180.0 / rows)
    lon = -180.0 + (c + 0.5) * (360.0 / cols)
    return lat, lon


def generate_synthetic(mixture: MixtureSpec, n: int, seed: int) -> Dataset:
    """Deterministic synthetic dataset: mixture draws placed on a world grid."""
    values, _ = sample_mixture(mixture, n, seed)
    lat, lon = grid_coordinates(n)
    width = len(str(n - 1)) if n > 1 else 1
    regions = [Region(f"g{i:0{width}d}", float(lat[i]), float(lon[i])) for i in range(n)]
    return Dataset(regions, [VariableSpec(v) for v in mixture.variables], values)


def clustered_mixture(
    weights: Sequence[float],
    positions: Sequence[float],
    widths: Sequence[float],
    n_variables: int = 3,
    direction: Sequence[float] | None = None,
) -> MixtureSpec:
    """Mixture whose components line up along one correlated axis.

    ``positions`` and ``widths`` are in axis units; the component means are
    ``position * direction`` so the dominant variance direction is the axis
    itself. Handy for demos and selection experiments.
    """
    if not (len(weights) == len(positions) == len(widths)):
        raise ValidationError("weights, positions, widths must have equal length")
    if direction is None:
        direction = [1.0 - 0.25 * j / max(n_variables - 1, 1) for j in range(n_variables)]
    direction = np.asarray(direction, dtype=np.float64)
    if direction.shape != (n_variables,):
        raise ValidationError(f"direction must have {n_variables} entries")
    names = tuple(f"v{j}" for j in range(n_variables))
    components = tuple(
        MixtureComponent(
            tuple(float(p) * direction),
            tuple(float(w) * np.abs(direction)),
            float(wt),
        )
        for wt, p, w in zip(weights, positions, widths)
    )
    return MixtureSpec(names, components)

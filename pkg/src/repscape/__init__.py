"""Representativeness scoring and ideal-site selection for gridded
multivariate geospatial data.

The pipeline: ingest a region/variable table, filter and min-max
normalize it, project every region onto the first principal axis, measure
how well a set of sample sites covers the projected population, and
greedily pick new sites (one per histogram window, mode first) that
maximize that coverage. A random-sampling baseline puts any sample set's
score in context.
"""

from .dataset import (
    ColumnScaling,
    Dataset,
    FilterPredicate,
    MixtureComponent,
    MixtureSpec,
    Region,
    VariableSpec,
    apply_filter,
    generate_synthetic,
    ingest_csv,
    normalize_columns,
    write_csv,
)
from .histogram import (
    EQUAL_FREQUENCY,
    EQUAL_WIDTH,
    Histogram,
    WindowPartition,
    build_equal_frequency,
    build_equal_width,
    build_histogram,
)
from .pca import PrincipalAxisProjector, Projection, jacobi_eigh
from .pipeline import Analysis, prepare_analysis, resolve_samples, run_ideal, score_samples
from .representativeness import (
    MODE_HEAT,
    MODE_WINDOW,
    ColorScale,
    RepresentativenessReport,
    SampleSet,
    SampleSite,
    bucket_distances,
    final_distance,
    normalize_distances,
    score_heat,
    score_window_coverage,
)
from .selection import (
    BaselineResult,
    SelectionConfig,
    SelectionResult,
    percentile_of,
    random_baseline,
    select_ideal,
)

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "BaselineResult",
    "ColorScale",
    "ColumnScaling",
    "Dataset",
    "EQUAL_FREQUENCY",
    "EQUAL_WIDTH",
    "FilterPredicate",
    "Histogram",
    "MixtureComponent",
    "MixtureSpec",
    "MODE_HEAT",
    "MODE_WINDOW",
    "PrincipalAxisProjector",
    "Projection",
    "Region",
    "RepresentativenessReport",
    "SampleSet",
    "SampleSite",
    "SelectionConfig",
    "SelectionResult",
    "VariableSpec",
    "WindowPartition",
    "apply_filter",
    "bucket_distances",
    "build_equal_frequency",
    "build_equal_width",
    "build_histogram",
    "final_distance",
    "generate_synthetic",
    "ingest_csv",
    "jacobi_eigh",
    "normalize_columns",
    "normalize_distances",
    "percentile_of",
    "prepare_analysis",
    "random_baseline",
    "resolve_samples",
    "run_ideal",
    "score_heat",
    "score_samples",
    "score_window_coverage",
    "select_ideal",
    "write_csv",
]

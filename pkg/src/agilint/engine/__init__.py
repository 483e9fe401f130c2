"""Metric catalog, evaluation engine, result cache."""

from .cache import CacheEntry, ResultCache
from .catalog import (
    AUTO_PLACEHOLDERS,
    Catalog,
    CatalogInvalid,
    MetricDef,
    UnknownMetric,
    builtin_catalog,
    load_catalog,
    load_catalog_file,
    validate_metric,
)
from .core import (
    Engine,
    EngineConfig,
    MetricEvaluationError,
    StaleRevision,
    UnknownTeam,
)
from .detectors import DETECTORS, DetectorContext, DetectorUnknown, run_detector, sprint_backlog
from .results import (
    STATUS_ERROR,
    STATUS_INAPPLICABLE,
    STATUS_SCORED,
    CellScores,
    MetricResult,
    ScoreMatrix,
    Violation,
    aggregate_cell,
    matrix_from_results,
    read_results,
    write_results,
)

__all__ = [
    "AUTO_PLACEHOLDERS",
    "Catalog",
    "CatalogInvalid",
    "CacheEntry",
    "DETECTORS",
    "DetectorContext",
    "DetectorUnknown",
    "Engine",
    "EngineConfig",
    "MetricDef",
    "MetricEvaluationError",
    "MetricResult",
    "ResultCache",
    "STATUS_ERROR",
    "STATUS_INAPPLICABLE",
    "STATUS_SCORED",
    "CellScores",
    "ScoreMatrix",
    "StaleRevision",
    "UnknownMetric",
    "UnknownTeam",
    "Violation",
    "aggregate_cell",
    "builtin_catalog",
    "load_catalog",
    "load_catalog_file",
    "matrix_from_results",
    "read_results",
    "run_detector",
    "sprint_backlog",
    "validate_metric",
    "write_results",
]

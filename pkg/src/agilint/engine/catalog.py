"""Metric catalog: definitions, validation, the bundled set.

A metric is a query (or named native detector) that extracts violation
instances, plus a rating formula that turns violation statistics into a
0-100 score, plus a severity that weights the metric in aggregate
scores. Catalog loading is atomic: any invalid metric rejects the whole
document, with per-field errors.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources

from .. import mql
from ..scoring import (
    SEVERITY_LEVELS,
    RatingError,
    parse_rating,
    rating_bindings,
)
from .detectors import DETECTORS

# bound automatically for every evaluation, in addition to metric params
AUTO_PLACEHOLDERS = (
    "team",
    "sprint",
    "sprint_list",
    "past_sprint_list",
    "sprint_start",
    "sprint_end",
)

_ID_PATTERN = re.compile(r"^[a-z0-9]+(-[a-z0-9]+)*$")
_AGG_PREFIXES = ("avg", "sum", "max", "min")


class UnknownMetric(Exception):
    def __init__(self, metric_id: str):
        super().__init__(f"no metric {metric_id!r}")
        self.metric_id = metric_id


class CatalogInvalid(Exception):
    def __init__(self, errors: list[dict]):
        lines = "; ".join(f"{e['metric']}.{e['field']}: {e['reason']}" for e in errors)
        super().__init__(f"invalid catalog: {lines}")
        self.errors = errors


@dataclass(frozen=True)
class MetricDef:
    id: str
    name: str
    category: str
    severity: str
    data_source: str
    description: str
    kind: str  # "query" | "native"
    query: str  # MQL text, or detector name for native metrics
    context_queries: dict[str, str] = field(default_factory=dict)
    params: dict[str, float] = field(default_factory=dict)
    rating: str = "100"
    aliases: dict[str, str] = field(default_factory=dict)
    revision: int = 1

    def to_document(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "category": self.category,
            "severity": self.severity,
            "data_source": self.data_source,
            "description": self.description,
            "kind": self.kind,
            "query": self.query,
            "context_queries": dict(self.context_queries),
            "params": dict(self.params),
            "rating": self.rating,
            "aliases": dict(self.aliases),
            "revision": self.revision,
        }


@dataclass(frozen=True)
class Catalog:
    metrics: tuple

    @property
    def by_id(self) -> dict[str, MetricDef]:
        return {metric.id: metric for metric in self.metrics}

    @property
    def category_order(self) -> list[str]:
        order: list[str] = []
        for metric in self.metrics:
            if metric.category not in order:
                order.append(metric.category)
        return order

    def get(self, metric_id: str) -> MetricDef:
        for metric in self.metrics:
            if metric.id == metric_id:
                return metric
        raise UnknownMetric(metric_id)

    def with_metric(self, updated: MetricDef) -> "Catalog":
        return Catalog(tuple(updated if m.id == updated.id else m for m in self.metrics))

    def to_document(self) -> dict:
        return {"metrics": [metric.to_document() for metric in self.metrics]}


def _declared_columns(metric: MetricDef) -> list[str]:
    if metric.kind == "native":
        detector = DETECTORS.get(metric.query)
        return list(detector.columns) if detector else []
    try:
        return mql.output_columns(mql.parse(metric.query))
    except Exception:
        return []


def validate_metric(metric: MetricDef) -> list[dict]:
    """Field-level problems with one metric (empty list = valid)."""
    errors: list[dict] = []

    def bad(field_name: str, reason: str, offset: int | None = None):
        entry = {"metric": metric.id or "?", "field": field_name, "reason": reason}
        if offset is not None:
            entry["offset"] = offset
        errors.append(entry)

    if not metric.id or not _ID_PATTERN.match(metric.id):
        bad("id", "must be a lowercase dash slug")
    if not metric.name:
        bad("name", "must not be empty")
    if not metric.category:
        bad("category", "must not be empty")
    if metric.severity not in SEVERITY_LEVELS:
        bad("severity", f"must be one of {'/'.join(SEVERITY_LEVELS)}")
    if metric.kind not in ("query", "native"):
        bad("kind", "must be query or native")
    if not isinstance(metric.revision, int) or metric.revision < 1:
        bad("revision", "must be a positive integer")

    for name, value in metric.params.items():
        if not name.isidentifier():
            bad("params", f"param name {name!r} is not an identifier")
        elif not isinstance(value, (int, float)) or isinstance(value, bool):
            bad("params", f"param {name!r} must be a number")

    allowed_placeholders = set(AUTO_PLACEHOLDERS) | set(metric.params)

    if metric.kind == "query":
        try:
            ast = mql.parse(metric.query)
            for name in mql.query_placeholders(ast):
                if name not in allowed_placeholders:
                    bad("query", f"placeholder {{{name}}} is neither automatic nor a param")
        except mql.LexError as exc:
            bad("query", str(exc), exc.offset)
        except mql.ParseError as exc:
            bad("query", str(exc), exc.offset)
        except mql.ScopeError as exc:
            bad("query", str(exc), exc.offset)
    elif metric.kind == "native":
        if metric.query not in DETECTORS:
            bad("query", f"unknown detector {metric.query!r}")

    for name, text in metric.context_queries.items():
        if not name.isidentifier():
            bad("context_queries", f"context name {name!r} is not an identifier")
            continue
        try:
            ast = mql.parse(text)
            if len(mql.output_columns(ast)) != 1:
                bad("context_queries", f"{name!r} must return exactly one column")
            for placeholder in mql.query_placeholders(ast):
                if placeholder not in allowed_placeholders:
                    bad("context_queries", f"{name!r} uses unknown placeholder {{{placeholder}}}")
        except (mql.LexError, mql.ParseError, mql.ScopeError) as exc:
            bad("context_queries", f"{name!r}: {exc}", getattr(exc, "offset", None))

    columns = _declared_columns(metric)
    aggregate_names = {f"{prefix}_{column}" for prefix in _AGG_PREFIXES for column in columns}
    resolvable = (
        {"violations"}
        | set(metric.params)
        | set(metric.context_queries)
        | aggregate_names
    )

    for alias, target in metric.aliases.items():
        if not alias.isidentifier():
            bad("aliases", f"alias {alias!r} is not an identifier")
        if target not in resolvable:
            bad("aliases", f"alias {alias!r} points at unresolvable {target!r}")

    try:
        expr = parse_rating(metric.rating)
        for name in rating_bindings(expr):
            if name not in resolvable and name not in metric.aliases:
                bad("rating", f"binding {name!r} is not resolvable", None)
    except RatingError as exc:
        bad("rating", str(exc), getattr(exc, "offset", None))

    return errors


def _metric_from_document(entry: dict) -> MetricDef:
    return MetricDef(
        id=entry.get("id", ""),
        name=entry.get("name", ""),
        category=entry.get("category", ""),
        severity=entry.get("severity", ""),
        data_source=entry.get("data_source", ""),
        description=entry.get("description", ""),
        kind=entry.get("kind", "query"),
        query=entry.get("query", ""),
        context_queries=dict(entry.get("context_queries") or {}),
        params=dict(entry.get("params") or {}),
        rating=entry.get("rating", "100"),
        aliases=dict(entry.get("aliases") or {}),
        revision=entry.get("revision", 1),
    )


def load_catalog(document: dict) -> Catalog:
    """Parse and validate a catalog document; atomic accept-or-reject."""
    if not isinstance(document, dict) or not isinstance(document.get("metrics"), list):
        raise CatalogInvalid([{"metric": "?", "field": "metrics", "reason": "expected a metrics array"}])
    metrics = [_metric_from_document(entry) for entry in document["metrics"]]
    errors: list[dict] = []
    seen: set[str] = set()
    for metric in metrics:
        if metric.id in seen:
            errors.append({"metric": metric.id, "field": "id", "reason": "duplicate metric id"})
        seen.add(metric.id)
        errors.extend(validate_metric(metric))
    if errors:
        raise CatalogInvalid(errors)
    return Catalog(tuple(metrics))


def load_catalog_file(path) -> Catalog:
    with open(path, "r", encoding="utf-8") as handle:
        return load_catalog(json.load(handle))


def builtin_catalog() -> Catalog:
    """The bundled ten-metric catalog."""
    text = resources.files("agilint.data").joinpath("builtin_catalog.json").read_text("utf-8")
    return load_catalog(json.loads(text))


def updated_metric(metric: MetricDef, fields: dict) -> MetricDef:
    """Apply editable fields and bump the revision; does not validate."""
    editable = {
        "name", "category", "severity", "data_source", "description",
        "kind", "query", "context_queries", "params", "rating", "aliases",
    }
    unknown = set(fields) - editable
    if unknown:
        raise CatalogInvalid(
            [{"metric": metric.id, "field": name, "reason": "field is not editable"} for name in sorted(unknown)]
        )
    return replace(metric, **fields, revision=metric.revision + 1)

"""Evaluation engine: runs every metric per team per sprint, caches
results, aggregates scores, and owns the revisioned metric-edit loop.

Evaluations read the immutable store and may run concurrently; catalog
updates go through a single-writer lock, bump the metric's revision,
keep the superseded definition in an audit log, and invalidate that
metric's cache entries. An in-flight evaluation completes against the
definition it captured; its result carries that revision, so readers
can always tell what produced a number.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .. import mql
from ..graph import GraphStore
from ..ingest.project import ProjectConfig, SprintDescriptor, TeamDescriptor, extract_sprints, extract_teams
from ..scoring import (
    DEFAULT_SEVERITY_WEIGHTS,
    DegenerateInput,
    NothingToAggregate,
    eval_rating,
    parse_rating,
    standard_bindings,
)
from .cache import ResultCache
from .catalog import Catalog, CatalogInvalid, MetricDef, updated_metric, validate_metric
from .detectors import DetectorContext, run_detector
from .results import (
    STATUS_ERROR,
    STATUS_INAPPLICABLE,
    STATUS_SCORED,
    MetricResult,
    ScoreMatrix,
    aggregate_cell,
    violations_from_table,
)


class UnknownTeam(Exception):
    def __init__(self, team: str):
        super().__init__(f"no team {team!r}")
        self.team = team


class StaleRevision(Exception):
    def __init__(self, metric_id: str, expected: int, current: int):
        super().__init__(
            f"metric {metric_id!r}: update based on revision {expected}, current is {current}"
        )
        self.metric_id = metric_id
        self.current = current


class MetricEvaluationError(Exception):
    def __init__(self, metric_id: str, cause: Exception):
        super().__init__(f"metric {metric_id!r}: {cause}")
        self.metric_id = metric_id
        self.cause = cause


@dataclass
class EngineConfig:
    cache_ttl_seconds: float = 900.0
    severity_weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_SEVERITY_WEIGHTS))
    port: int = 8600

    @classmethod
    def from_document(cls, document: dict) -> "EngineConfig":
        weights = dict(DEFAULT_SEVERITY_WEIGHTS)
        weights.update(document.get("severity_weights", {}))
        return cls(
            cache_ttl_seconds=float(document.get("cache_ttl_seconds", 900)),
            severity_weights=weights,
            port=int(document.get("port", 8600)),
        )


@dataclass
class AuditEntry:
    at: datetime
    metric_id: str
    old_revision: int
    new_revision: int
    previous: dict


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Engine:
    def __init__(
        self,
        store: GraphStore,
        catalog: Catalog,
        project_config: ProjectConfig | None = None,
        config: EngineConfig | None = None,
        clock=None,
    ):
        self.store = store
        self.config = config or EngineConfig()
        self.clock = clock or _utcnow
        self.project_config = project_config or ProjectConfig()
        self.sprints: list[SprintDescriptor] = extract_sprints(store, self.project_config)
        self.teams: list[TeamDescriptor] = extract_teams(store, self.project_config)
        self.data_version = store.data_version()
        self.cache = ResultCache(self.config.cache_ttl_seconds, clock=self.clock)
        self.audit_log: list[AuditEntry] = []
        self._catalog = catalog
        self._catalog_lock = threading.RLock()
        self._compiled: dict[tuple[str, int, str], object] = {}

    # -- catalog access ----------------------------------------------------

    @property
    def catalog(self) -> Catalog:
        with self._catalog_lock:
            return self._catalog

    def team(self, name: str) -> TeamDescriptor:
        for team in self.teams:
            if team.name == name or team.label_name == name:
                return team
        raise UnknownTeam(name)

    def _compile(self, metric: MetricDef, role: str, text: str):
        key = (metric.id, metric.revision, role)
        compiled = self._compiled.get(key)
        if compiled is None:
            compiled = mql.parse(text) if role.startswith("q:") else parse_rating(text)
            self._compiled[key] = compiled
        return compiled

    # -- evaluation ---------------------------------------------------------

    def placeholder_bindings(self, team: TeamDescriptor, sprint: SprintDescriptor, metric: MetricDef) -> dict:
        titles = [s.title for s in self.sprints]
        index = next(i for i, s in enumerate(self.sprints) if s.title == sprint.title)
        bindings = {
            "team": team.label_name,
            "sprint": sprint.title,
            "sprint_list": titles[: index + 1],
            "past_sprint_list": titles[:index],
            "sprint_start": sprint.start,
            "sprint_end": sprint.end,
        }
        bindings.update(metric.params)
        return bindings

    def _context_scalars(self, metric: MetricDef, bindings: dict) -> dict[str, float]:
        scalars: dict[str, float] = {}
        for name, text in sorted(metric.context_queries.items()):
            ast = self._compile(metric, f"q:ctx:{name}", text)
            table = mql.evaluate(mql.bind_placeholders(ast, bindings), self.store)
            if len(table.rows) != 1 or len(table.columns) != 1:
                raise ValueError(
                    f"context query {name!r} returned {len(table.rows)}x{len(table.columns)}, expected 1x1"
                )
            value = table.rows[0][0]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"context query {name!r} returned non-numeric {value!r}")
            scalars[name] = float(value)
        return scalars

    def evaluate_metric(
        self,
        metric: MetricDef,
        team: TeamDescriptor,
        sprint: SprintDescriptor,
        use_cache: bool = True,
    ) -> MetricResult:
        """Evaluate one (metric, team, sprint) cell, via cache when fresh."""
        key = (metric.id, metric.revision, team.name, sprint.title, self.data_version)
        if use_cache:
            hit = self.cache.get(key)
            if hit is not None:
                return hit

        def build(status: str, score, detail: str, violations, bindings) -> MetricResult:
            return MetricResult(
                metric_id=metric.id,
                metric_name=metric.name,
                category=metric.category,
                severity=metric.severity,
                team=team.name,
                sprint=sprint.title,
                sprint_ordinal=sprint.ordinal,
                status=status,
                score=score,
                detail=detail,
                violations=violations,
                bindings=bindings,
                evaluated_at=self.clock(),
                data_version=self.data_version,
                metric_revision=metric.revision,
            )

        try:
            placeholder_values = self.placeholder_bindings(team, sprint, metric)
            if metric.kind == "native":
                context = DetectorContext(
                    team=team,
                    sprint=sprint,
                    sprint_list=placeholder_values["sprint_list"],
                    past_sprint_list=placeholder_values["past_sprint_list"],
                    params=dict(metric.params),
                )
                table = run_detector(metric.query, self.store, context)
            else:
                ast = self._compile(metric, "q:main", metric.query)
                table = mql.evaluate(mql.bind_placeholders(ast, placeholder_values), self.store)
            context_scalars = self._context_scalars(metric, placeholder_values)
            score_bindings = standard_bindings(table, context_scalars, metric.params, metric.aliases)
            violations = violations_from_table(self.store, table)
            rating = self._compile(metric, "r:rating", metric.rating)
            try:
                score = eval_rating(rating, score_bindings)
            except DegenerateInput as degenerate:
                result = build(STATUS_INAPPLICABLE, None, str(degenerate), violations, score_bindings)
            else:
                result = build(STATUS_SCORED, score, "", violations, score_bindings)
        except Exception as exc:
            raise MetricEvaluationError(metric.id, exc) from exc

        if use_cache:
            self.cache.put(key, result)
        return result

    def evaluate_all(self, use_cache: bool = True) -> ScoreMatrix:
        """Every (metric, team, sprint); failing metrics are recorded as
        errored and excluded from aggregation. Raises NothingToAggregate
        only when not a single metric applied anywhere."""
        catalog = self.catalog
        matrix = ScoreMatrix(
            teams=[team.name for team in self.teams],
            sprints=list(self.sprints),
            data_version=self.data_version,
            category_order=catalog.category_order,
        )
        any_scored = False
        for sprint in self.sprints:
            for team in self.teams:
                results: list[MetricResult] = []
                for metric in catalog.metrics:
                    try:
                        result = self.evaluate_metric(metric, team, sprint, use_cache=use_cache)
                    except MetricEvaluationError as failure:
                        result = MetricResult(
                            metric_id=metric.id,
                            metric_name=metric.name,
                            category=metric.category,
                            severity=metric.severity,
                            team=team.name,
                            sprint=sprint.title,
                            sprint_ordinal=sprint.ordinal,
                            status=STATUS_ERROR,
                            score=None,
                            detail=str(failure),
                            violations=[],
                            bindings={},
                            evaluated_at=self.clock(),
                            data_version=self.data_version,
                            metric_revision=metric.revision,
                        )
                    results.append(result)
                    any_scored = any_scored or result.status == STATUS_SCORED
                matrix.cells[(team.name, sprint.title)] = aggregate_cell(
                    results, self.config.severity_weights, catalog.category_order
                )
        if matrix.cells and not any_scored:
            raise NothingToAggregate("no metric applied to any team/sprint")
        return matrix

    # -- trends --------------------------------------------------------------

    def trend(self, matrix: ScoreMatrix, team_name: str, target: str = "overall") -> list[dict]:
        """Per-sprint series for a team. ``target`` is ``overall``,
        ``category:<name>``, or ``metric:<id>``. Inapplicable sprints
        keep their slot with a null score (the gap marker)."""
        if team_name not in matrix.teams:
            raise UnknownTeam(team_name)
        points = []
        for sprint in matrix.sprints:
            cell = matrix.cells[(team_name, sprint.title)]
            if target == "overall":
                score = cell.overall
            elif target.startswith("category:"):
                score = cell.category_scores.get(target.split(":", 1)[1])
            elif target.startswith("metric:"):
                metric_id = target.split(":", 1)[1]
                score = None
                for result in cell.results:
                    if result.metric_id == metric_id and result.status == STATUS_SCORED:
                        score = result.score
            else:
                raise ValueError(f"bad trend target {target!r}")
            points.append({"sprint": sprint.title, "ordinal": sprint.ordinal, "score": score})
        return points

    # -- the edit loop ---------------------------------------------------------

    def update_metric(self, metric_id: str, fields: dict, expected_revision: int | None = None) -> MetricDef:
        """Validate and apply an edit; bumps revision, logs the old
        definition, and drops the metric's cache entries."""
        with self._catalog_lock:
            current = self._catalog.get(metric_id)
            if expected_revision is not None and expected_revision != current.revision:
                raise StaleRevision(metric_id, expected_revision, current.revision)
            candidate = updated_metric(current, fields)
            errors = validate_metric(candidate)
            if errors:
                raise CatalogInvalid(errors)
            self._catalog = self._catalog.with_metric(candidate)
            self.audit_log.append(
                AuditEntry(
                    at=self.clock(),
                    metric_id=metric_id,
                    old_revision=current.revision,
                    new_revision=candidate.revision,
                    previous=current.to_document(),
                )
            )
            self.cache.invalidate_metric(metric_id)
            return candidate

"""Result records: per-metric evaluations, violations, the score matrix.

Results serialize to an append-only JSON-lines store, one MetricResult
per line. Category and overall scores are not persisted; reports
recompute them from the contained results, which keeps the aggregation
auditable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime

from ..graph import GraphStore, parse_timestamp, render_timestamp
from ..ingest.project import SprintDescriptor
from ..mql import BindingTable, NodeRef
from ..scoring import NothingToAggregate, aggregate_scores

STATUS_SCORED = "scored"
STATUS_INAPPLICABLE = "inapplicable"
STATUS_ERROR = "error"


def artifact_ref(store: GraphStore, node_id: int) -> tuple[str, str]:
    """(kind, stable ref) for a node; prefers its url."""
    node = store.node(node_id)
    props = node.properties
    if isinstance(props.get("url"), str) and props["url"]:
        return node.label, props["url"]
    if node.label == "Issue":
        return node.label, f"issue #{props.get('number', node_id)}"
    if node.label == "Commit":
        return node.label, str(props.get("sha", node_id))
    if node.label == "Developer":
        return node.label, str(props.get("login", node_id))
    if node.label == "File":
        return node.label, str(props.get("path", node_id))
    if node.label == "Label":
        return node.label, str(props.get("name", node_id))
    if node.label == "Milestone":
        return node.label, str(props.get("title", node_id))
    if node.label == "TestRun":
        return node.label, f"run for {props.get('commit_sha', node_id)}"
    stamp = props.get("created_at")
    when = render_timestamp(stamp) if isinstance(stamp, datetime) else "?"
    return node.label, f"{props.get('event', 'event')} @ {when}"


def display_value(store: GraphStore, value):
    """JSON-friendly rendering of a table cell."""
    if isinstance(value, NodeRef):
        return artifact_ref(store, value.id)[1]
    if isinstance(value, datetime):
        return render_timestamp(value)
    if isinstance(value, list):
        return [display_value(store, item) for item in value]
    return value


@dataclass
class Violation:
    artifact_kind: str
    artifact_ref: str
    columns: dict[str, object]

    def to_document(self) -> dict:
        return {"kind": self.artifact_kind, "ref": self.artifact_ref, "columns": self.columns}

    @classmethod
    def from_document(cls, document: dict) -> "Violation":
        return cls(document["kind"], document["ref"], dict(document.get("columns", {})))


def violations_from_table(store: GraphStore, table: BindingTable) -> list[Violation]:
    """One violation per row; the first node-valued column names the
    artifact the row is about."""
    violations = []
    for row in table.rows:
        kind, ref = "", ""
        for value in row:
            if isinstance(value, NodeRef):
                kind, ref = artifact_ref(store, value.id)
                break
        columns = {name: display_value(store, value) for name, value in zip(table.columns, row)}
        violations.append(Violation(kind, ref, columns))
    return violations


@dataclass
class MetricResult:
    metric_id: str
    metric_name: str
    category: str
    severity: str
    team: str
    sprint: str
    sprint_ordinal: int
    status: str  # scored | inapplicable | error
    score: float | None
    detail: str
    violations: list[Violation]
    bindings: dict[str, float]
    evaluated_at: datetime
    data_version: str
    metric_revision: int

    @property
    def applicable(self) -> bool:
        return self.status == STATUS_SCORED

    def to_document(self) -> dict:
        return {
            "metric_id": self.metric_id,
            "metric_name": self.metric_name,
            "category": self.category,
            "severity": self.severity,
            "team": self.team,
            "sprint": self.sprint,
            "sprint_ordinal": self.sprint_ordinal,
            "status": self.status,
            "score": self.score,
            "detail": self.detail,
            "violations": [violation.to_document() for violation in self.violations],
            "bindings": self.bindings,
            "evaluated_at": render_timestamp(self.evaluated_at),
            "data_version": self.data_version,
            "metric_revision": self.metric_revision,
        }

    @classmethod
    def from_document(cls, document: dict) -> "MetricResult":
        return cls(
            metric_id=document["metric_id"],
            metric_name=document["metric_name"],
            category=document["category"],
            severity=document["severity"],
            team=document["team"],
            sprint=document["sprint"],
            sprint_ordinal=document["sprint_ordinal"],
            status=document["status"],
            score=document["score"],
            detail=document.get("detail", ""),
            violations=[Violation.from_document(v) for v in document.get("violations", [])],
            bindings=dict(document.get("bindings", {})),
            evaluated_at=parse_timestamp(document["evaluated_at"]),
            data_version=document["data_version"],
            metric_revision=document["metric_revision"],
        )


@dataclass
class CellScores:
    results: list[MetricResult]
    category_scores: dict[str, float | None]
    overall: float | None


@dataclass
class ScoreMatrix:
    teams: list[str]
    sprints: list[SprintDescriptor]
    cells: dict[tuple[str, str], CellScores] = field(default_factory=dict)
    data_version: str = ""
    category_order: list[str] = field(default_factory=list)

    def cell(self, team: str, sprint_title: str) -> CellScores:
        return self.cells[(team, sprint_title)]

    def all_results(self) -> list[MetricResult]:
        ordered = []
        for sprint in self.sprints:
            for team in self.teams:
                ordered.extend(self.cells[(team, sprint.title)].results)
        return ordered


def aggregate_cell(
    results: list[MetricResult],
    severity_weights: dict[str, float],
    category_order: list[str],
) -> CellScores:
    """Fold one (team, sprint) result list into category/overall scores.

    The overall score is the severity-weighted mean over all scored
    metrics directly; categories aggregate their own metrics the same
    way. Inapplicable and errored metrics are excluded.
    """
    scored = [r for r in results if r.status == STATUS_SCORED]
    categories: dict[str, float | None] = {}
    for category in category_order:
        entries = [
            (r.score, severity_weights[r.severity]) for r in scored if r.category == category
        ]
        try:
            categories[category] = aggregate_scores(entries)
        except NothingToAggregate:
            categories[category] = None
    try:
        overall = aggregate_scores([(r.score, severity_weights[r.severity]) for r in scored])
    except NothingToAggregate:
        overall = None
    return CellScores(results, categories, overall)


def write_results(path, matrix: ScoreMatrix) -> None:
    import json

    with open(path, "w", encoding="utf-8") as handle:
        for result in matrix.all_results():
            handle.write(json.dumps(result.to_document(), sort_keys=True) + "\n")


def read_results(path) -> list[MetricResult]:
    import json

    results = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                results.append(MetricResult.from_document(json.loads(line)))
    return results


def matrix_from_results(
    results: list[MetricResult],
    severity_weights: dict[str, float],
    category_order: list[str] | None = None,
) -> ScoreMatrix:
    """Rebuild a score matrix (and its aggregates) from stored results."""
    if category_order is None:
        category_order = []
        for result in results:
            if result.category not in category_order:
                category_order.append(result.category)
    sprint_info: dict[str, int] = {}
    teams: list[str] = []
    for result in results:
        sprint_info.setdefault(result.sprint, result.sprint_ordinal)
        if result.team not in teams:
            teams.append(result.team)
    sprints = [
        SprintDescriptor(title, ordinal, datetime.min, datetime.min)
        for title, ordinal in sorted(sprint_info.items(), key=lambda kv: kv[1])
    ]
    teams.sort()
    matrix = ScoreMatrix(
        teams=teams,
        sprints=sprints,
        data_version=results[0].data_version if results else "",
        category_order=category_order,
    )
    for sprint in sprints:
        for team in teams:
            cell_results = [r for r in results if r.team == team and r.sprint == sprint.title]
            matrix.cells[(team, sprint.title)] = aggregate_cell(
                cell_results, severity_weights, category_order
            )
    return matrix

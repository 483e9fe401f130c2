"""Report documents rendered from a score matrix.

Reports are reproducible: regenerating from the same results is
byte-identical. Scores are rounded to two decimals, keys sort stably,
and the generation stamp is the latest evaluation time contained in the
results rather than the wall clock.
"""

from __future__ import annotations

import json

from ..graph import render_timestamp
from ..engine.results import ScoreMatrix

_TOP_VIOLATIONS = 10


def _round(score: float | None) -> float | None:
    return None if score is None else round(score, 2)


def _metric_sort_key(entry: dict):
    return (entry["score"] is None, entry["score"] if entry["score"] is not None else 0.0, entry["id"])


def build_report(
    matrix: ScoreMatrix,
    team: str | None = None,
    sprint: str | None = None,
) -> dict:
    """Assemble the report document, optionally scoped to one team or
    sprint. Within a category, metrics sort ascending by score (the
    worst first), inapplicable ones last."""
    teams = [team] if team else matrix.teams
    sprints = [s for s in matrix.sprints if sprint is None or s.title == sprint]
    latest = None
    for cell_key in ((t, s.title) for s in sprints for t in teams):
        for result in matrix.cells[cell_key].results:
            if latest is None or result.evaluated_at > latest:
                latest = result.evaluated_at

    sprint_reports = []
    for descriptor in sprints:
        team_reports = {}
        for team_name in teams:
            cell = matrix.cells[(team_name, descriptor.title)]
            categories = {}
            for category in matrix.category_order:
                entries = []
                for result in cell.results:
                    if result.category != category:
                        continue
                    entries.append(
                        {
                            "id": result.metric_id,
                            "name": result.metric_name,
                            "severity": result.severity,
                            "status": result.status,
                            "score": _round(result.score),
                            "violation_count": len(result.violations),
                            "top_violations": [
                                violation.to_document()
                                for violation in result.violations[:_TOP_VIOLATIONS]
                            ],
                        }
                    )
                entries.sort(key=_metric_sort_key)
                categories[category] = {
                    "score": _round(cell.category_scores.get(category)),
                    "metrics": entries,
                }
            team_reports[team_name] = {
                "overall": _round(cell.overall),
                "categories": categories,
            }
        sprint_reports.append(
            {"sprint": descriptor.title, "ordinal": descriptor.ordinal, "teams": team_reports}
        )

    return {
        "generated_at": render_timestamp(latest) if latest else None,
        "data_version": matrix.data_version,
        "category_order": matrix.category_order,
        "sprints": sprint_reports,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def report_text(report: dict) -> str:
    lines = [
        f"data version : {report['data_version']}",
        f"generated at : {report['generated_at']}",
        "",
    ]
    for sprint_block in report["sprints"]:
        lines.append(f"== {sprint_block['sprint']} ==")
        for team_name in sorted(sprint_block["teams"]):
            team_block = sprint_block["teams"][team_name]
            overall = team_block["overall"]
            overall_text = f"{overall:.2f}" if overall is not None else "n/a"
            lines.append(f"  team {team_name}  overall {overall_text}")
            for category in report["category_order"]:
                block = team_block["categories"][category]
                score = block["score"]
                score_text = f"{score:.2f}" if score is not None else "n/a"
                lines.append(f"    {category}: {score_text}")
                for metric in block["metrics"]:
                    metric_score = metric["score"]
                    metric_text = f"{metric_score:.2f}" if metric_score is not None else metric["status"]
                    lines.append(
                        f"      {metric['id']:<22} {metric_text:>8}  violations: {metric['violation_count']}"
                    )
        lines.append("")
    return "\n".join(lines)

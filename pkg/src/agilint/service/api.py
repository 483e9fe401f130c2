"""HTTP API over one snapshot and one catalog.

Read endpoints serve numbers straight out of the engine's score matrix;
the matrix reference swaps atomically, so one response never mixes
revisions. Writes are the metric editor's PUT (optimistic concurrency
via the revision field) and POST /api/evaluate, which re-runs the
engine and swaps the matrix in.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..engine import CatalogInvalid, Engine, StaleRevision, UnknownMetric
from ..engine.core import UnknownTeam
from ..engine.results import ScoreMatrix


class ApiState:
    def __init__(self, engine: Engine):
        self.engine = engine
        self._matrix: ScoreMatrix | None = None
        self._lock = threading.Lock()

    @property
    def matrix(self) -> ScoreMatrix:
        with self._lock:
            if self._matrix is None:
                self._matrix = self.engine.evaluate_all()
            return self._matrix

    def refresh(self, use_cache: bool = False) -> ScoreMatrix:
        matrix = self.engine.evaluate_all(use_cache=use_cache)
        with self._lock:
            self._matrix = matrix
        return matrix


def _error(status: int, message: str, **extra):
    return JSONResponse({"error": message, **extra}, status_code=status)


def _metric_entry(result) -> dict:
    return {
        "id": result.metric_id,
        "name": result.metric_name,
        "category": result.category,
        "severity": result.severity,
        "status": result.status,
        "score": result.score,
        "violation_count": len(result.violations),
        "revision": result.metric_revision,
        "detail": result.detail,
    }


def create_app(engine: Engine, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="agilint", docs_url=None, redoc_url=None)
    state = ApiState(engine)
    app.state.agilint = state

    @app.get("/api/health")
    def health():
        return {"status": "ok", "data_version": engine.data_version}

    @app.get("/api/teams")
    def teams():
        return {"teams": [{"name": t.name, "label": t.label_name} for t in engine.teams]}

    @app.get("/api/sprints")
    def sprints():
        return {
            "sprints": [
                {
                    "title": s.title,
                    "ordinal": s.ordinal,
                    "start": s.start.isoformat(),
                    "end": s.end.isoformat(),
                }
                for s in engine.sprints
            ]
        }

    @app.get("/api/metrics")
    def metrics():
        catalog = engine.catalog
        return {
            "category_order": catalog.category_order,
            "metrics": [metric.to_document() for metric in catalog.metrics],
        }

    @app.get("/api/scores")
    def scores(team: str = "", sprint: str = ""):
        if not team or not sprint:
            return _error(400, "team and sprint query parameters are required")
        matrix = state.matrix
        if team not in matrix.teams:
            return _error(404, f"unknown team {team!r}")
        if sprint not in [s.title for s in matrix.sprints]:
            return _error(404, f"unknown sprint {sprint!r}")
        cell = matrix.cell(team, sprint)
        entries = [_metric_entry(result) for result in cell.results]
        entries.sort(key=lambda e: (e["score"] is None, e["score"] if e["score"] is not None else 0.0, e["id"]))
        return {
            "team": team,
            "sprint": sprint,
            "overall": cell.overall,
            "categories": [
                {"name": name, "score": cell.category_scores.get(name)}
                for name in matrix.category_order
            ],
            "metrics": entries,
        }

    @app.get("/api/violations")
    def violations(metric: str = "", team: str = "", sprint: str = ""):
        if not metric or not team or not sprint:
            return _error(400, "metric, team and sprint query parameters are required")
        matrix = state.matrix
        if team not in matrix.teams:
            return _error(404, f"unknown team {team!r}")
        if sprint not in [s.title for s in matrix.sprints]:
            return _error(404, f"unknown sprint {sprint!r}")
        for result in matrix.cell(team, sprint).results:
            if result.metric_id == metric:
                return {
                    "metric": metric,
                    "team": team,
                    "sprint": sprint,
                    "status": result.status,
                    "score": result.score,
                    "violations": [violation.to_document() for violation in result.violations],
                }
        return _error(404, f"unknown metric {metric!r}")

    @app.get("/api/radar")
    def radar(sprint: str = ""):
        if not sprint:
            return _error(400, "sprint query parameter is required")
        matrix = state.matrix
        if sprint not in [s.title for s in matrix.sprints]:
            return _error(404, f"unknown sprint {sprint!r}")
        return {
            "sprint": sprint,
            "categories": matrix.category_order,
            "teams": [
                {
                    "team": team,
                    "scores": [
                        matrix.cell(team, sprint).category_scores.get(name)
                        for name in matrix.category_order
                    ],
                }
                for team in matrix.teams
            ],
        }

    @app.get("/api/trend")
    def trend(team: str = "", metric: str = "", category: str = ""):
        if not team:
            return _error(400, "team query parameter is required")
        if metric and category:
            return _error(400, "pass either metric or category, not both")
        target = "overall"
        if metric:
            target = f"metric:{metric}"
            if metric not in engine.catalog.by_id:
                return _error(404, f"unknown metric {metric!r}")
        elif category:
            target = f"category:{category}"
            if category not in engine.catalog.category_order:
                return _error(404, f"unknown category {category!r}")
        matrix = state.matrix
        try:
            points = engine.trend(matrix, team, target)
        except UnknownTeam:
            return _error(404, f"unknown team {team!r}")
        return {"team": team, "target": target, "points": points}

    @app.put("/api/metrics/{metric_id}")
    async def put_metric(metric_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            return _error(400, "expected a JSON object")
        revision = body.pop("revision", None)
        if revision is None:
            return _error(400, "revision field is required for optimistic concurrency")
        body.pop("id", None)
        try:
            updated = engine.update_metric(metric_id, body, expected_revision=int(revision))
        except UnknownMetric:
            return _error(404, f"unknown metric {metric_id!r}")
        except StaleRevision as stale:
            return _error(409, str(stale), current_revision=stale.current)
        except CatalogInvalid as invalid:
            return JSONResponse({"errors": invalid.errors}, status_code=422)
        return {"metric": updated.to_document()}

    @app.post("/api/evaluate")
    def evaluate():
        matrix = state.refresh(use_cache=False)
        return {
            "data_version": matrix.data_version,
            "results": len(matrix.all_results()),
            "teams": matrix.teams,
            "sprints": [s.title for s in matrix.sprints],
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="dashboard")

    return app

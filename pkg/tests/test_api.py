from __future__ import annotations

import threading

import pytest
from fastapi.testclient import TestClient

from agilint.ingest import generate_fixture
from agilint.service.api import create_app

from test_engine import make_engine

SCALE = {
    "teams": 2,
    "sprints": 3,
    "stories": 30,
    "commits": 60,
    "injected_violations": {"neverending-story": {"red": 2}},
}


@pytest.fixture()
def client():
    engine = make_engine(generate_fixture(31, SCALE))
    app = create_app(engine)
    with TestClient(app) as test_client:
        yield test_client, engine


def test_health(client):
    http, engine = client
    body = http.get("/api/health").json()
    assert body["status"] == "ok"
    assert body["data_version"] == engine.data_version


def test_teams_and_sprints(client):
    http, _ = client
    assert [t["name"] for t in http.get("/api/teams").json()["teams"]] == ["blue", "red"]
    sprints = http.get("/api/sprints").json()["sprints"]
    assert [s["ordinal"] for s in sprints] == [1, 2, 3]


def test_scores_sorted_ascending_with_engine_agreement(client):
    http, engine = client
    matrix = engine.evaluate_all()
    body = http.get("/api/scores", params={"team": "red", "sprint": "Sprint 03"}).json()
    cell = matrix.cell("red", "Sprint 03")
    assert body["overall"] == pytest.approx(cell.overall)
    by_id = {r.metric_id: r for r in cell.results}
    scores = [m["score"] for m in body["metrics"] if m["score"] is not None]
    assert scores == sorted(scores)
    for entry in body["metrics"]:
        assert entry["score"] == pytest.approx(by_id[entry["id"]].score)
        assert entry["violation_count"] == len(by_id[entry["id"]].violations)


def test_radar_matches_category_scores(client):
    http, engine = client
    matrix = engine.evaluate_all()
    body = http.get("/api/radar", params={"sprint": "Sprint 03"}).json()
    assert body["categories"] == matrix.category_order
    assert len(body["teams"]) == 2
    for team_block in body["teams"]:
        cell = matrix.cell(team_block["team"], "Sprint 03")
        assert team_block["scores"] == pytest.approx(
            [cell.category_scores[c] for c in matrix.category_order]
        )


def test_violations_endpoint(client):
    http, _ = client
    body = http.get(
        "/api/violations",
        params={"metric": "neverending-story", "team": "red", "sprint": "Sprint 03"},
    ).json()
    assert len(body["violations"]) == 2
    assert body["violations"][0]["ref"].startswith("https://")


def test_trend_endpoint(client):
    http, _ = client
    body = http.get("/api/trend", params={"team": "red"}).json()
    assert [p["ordinal"] for p in body["points"]] == [1, 2, 3]
    category = http.get("/api/trend", params={"team": "red", "category": "XP Practices"}).json()
    assert category["target"] == "category:XP Practices"


def test_404s(client):
    http, _ = client
    assert http.get("/api/scores", params={"team": "x", "sprint": "Sprint 03"}).status_code == 404
    assert http.get("/api/scores", params={"team": "red", "sprint": "Sprint 9"}).status_code == 404
    assert http.get(
        "/api/violations", params={"metric": "nope", "team": "red", "sprint": "Sprint 03"}
    ).status_code == 404
    assert http.get("/api/trend", params={"team": "red", "metric": "nope"}).status_code == 404


def test_400s(client):
    http, _ = client
    assert http.get("/api/scores").status_code == 400
    assert http.get("/api/radar").status_code == 400
    assert http.get("/api/trend", params={"team": "red", "metric": "a", "category": "b"}).status_code == 400


def test_put_validation_and_stale_revision(client):
    http, _ = client
    response = http.put(
        "/api/metrics/neverending-story", json={"revision": 1, "rating": "100-(violations"}
    )
    assert response.status_code == 422
    assert response.json()["errors"][0]["field"] == "rating"
    assert "offset" in response.json()["errors"][0]

    good = http.put(
        "/api/metrics/neverending-story", json={"revision": 1, "params": {"threshold": 3}}
    )
    assert good.status_code == 200
    assert good.json()["metric"]["revision"] == 2

    stale = http.put(
        "/api/metrics/neverending-story", json={"revision": 1, "params": {"threshold": 4}}
    )
    assert stale.status_code == 409
    assert stale.json()["current_revision"] == 2

    assert http.put("/api/metrics/ghost", json={"revision": 1}).status_code == 404
    assert (
        http.put("/api/metrics/neverending-story", json={"params": {"threshold": 1}}).status_code
        == 400
    )


def test_edit_then_reevaluate_reflects_new_revision_exactly_once(client):
    http, _ = client

    def flagship(body):
        return [m for m in body["metrics"] if m["id"] == "neverending-story"][0]

    before = flagship(http.get("/api/scores", params={"team": "red", "sprint": "Sprint 03"}).json())
    assert before["revision"] == 1 and before["violation_count"] == 2

    http.put("/api/metrics/neverending-story", json={"revision": 1, "params": {"threshold": 3}})
    # until re-evaluation completes the served matrix stays consistently old
    pending = flagship(http.get("/api/scores", params={"team": "red", "sprint": "Sprint 03"}).json())
    assert pending["revision"] == 1

    http.post("/api/evaluate")
    after = flagship(http.get("/api/scores", params={"team": "red", "sprint": "Sprint 03"}).json())
    assert after["revision"] == 2
    assert after["violation_count"] <= before["violation_count"]


def test_scores_never_mix_revisions_in_one_response(client):
    http, _ = client
    stop = threading.Event()
    problems = []

    def reader():
        while not stop.is_set():
            body = http.get("/api/scores", params={"team": "red", "sprint": "Sprint 03"}).json()
            revisions = {
                m["revision"] for m in body["metrics"] if m["id"] == "neverending-story"
            }
            if len(revisions) != 1:
                problems.append(revisions)

    thread = threading.Thread(target=reader)
    thread.start()
    revision = 1
    for threshold in (3, 4, 2, 5):
        http.put("/api/metrics/neverending-story", json={"revision": revision, "params": {"threshold": threshold}})
        revision += 1
        http.post("/api/evaluate")
    stop.set()
    thread.join()
    assert problems == []


def test_metrics_listing_matches_catalog(client):
    http, engine = client
    body = http.get("/api/metrics").json()
    assert len(body["metrics"]) == 10
    assert body["category_order"] == engine.catalog.category_order


def test_static_mount_serves_dashboard(tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>agilint</title>")
    engine = make_engine(generate_fixture(32, {"teams": 1, "sprints": 3, "stories": 9, "commits": 9}))
    app = create_app(engine, static_dir=tmp_path)
    with TestClient(app) as http:
        assert "agilint" in http.get("/").text
        assert http.get("/api/health").json()["status"] == "ok"

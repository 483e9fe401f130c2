from __future__ import annotations

import json

import pytest

from agilint.graph import GraphStore
from agilint.ingest import (
    ProjectConfig,
    extract_sprints,
    extract_teams,
    generate_fixture,
    load_commit_export,
    load_issue_export,
    load_test_runs,
)
from agilint.similarity import jaccard, title_tokens

SMALL = {"teams": 2, "sprints": 3, "stories": 30, "commits": 60}


def _load(bundle):
    store = GraphStore()
    load_issue_export(bundle.issues, store)
    load_commit_export(bundle.commits, store)
    load_test_runs(bundle.test_runs, store)
    return store


def test_same_seed_is_byte_identical():
    scale = {**SMALL, "injected_violations": {"neverending-story": 2}}
    first = generate_fixture(42, scale)
    second = generate_fixture(42, scale)
    for name in ("issues", "commits", "test_runs", "config", "manifest"):
        assert json.dumps(getattr(first, name), sort_keys=True) == json.dumps(
            getattr(second, name), sort_keys=True
        )


def test_different_seed_differs():
    assert generate_fixture(1, SMALL).commits != generate_fixture(2, SMALL).commits


def test_requested_counts_respected():
    bundle = generate_fixture(9, {"teams": 3, "sprints": 2, "stories": 57, "commits": 123})
    assert len(bundle.issues["issues"]) == 57
    assert len(bundle.commits["commits"]) == 123
    assert len(bundle.test_runs["runs"]) == 123


def test_course_scale_counts():
    bundle = generate_fixture(30, {"teams": 5, "sprints": 4, "stories": 379, "commits": 1802})
    assert len(bundle.issues["issues"]) == 379
    assert len(bundle.commits["commits"]) == 1802
    file_changes = sum(len(c["files"]) for c in bundle.commits["commits"])
    assert 24_000 <= file_changes <= 29_000  # ~14.5 files per commit


def test_injection_int_spreads_to_exact_total():
    bundle = generate_fixture(4, {**SMALL, "injected_violations": {"neverending_story": 3}})
    entries = [v for v in bundle.manifest["violations"] if v["metric"] == "neverending-story"]
    assert len(entries) == 3


def test_injection_dict_targets_team():
    bundle = generate_fixture(4, {**SMALL, "injected_violations": {"monster-stories": {"red": 2}}})
    entries = [v for v in bundle.manifest["violations"] if v["metric"] == "monster-stories"]
    assert len(entries) == 2
    store = _load(bundle)
    for entry in entries:
        number = int(entry["artifact"].rsplit("/", 1)[1])
        issue = store.node(store.find_nodes("Issue", "number", number)[0])
        labels = [
            store.node(other).properties["name"]
            for _, other in store.neighbors(issue.id, "labels", "out")
        ]
        assert "team-red" in labels


def test_unknown_injection_key_rejected():
    with pytest.raises(ValueError):
        generate_fixture(1, {**SMALL, "injected_violations": {"not-a-metric": 1}})


def test_neverending_injection_discoverable_by_traversal():
    bundle = generate_fixture(8, {**SMALL, "injected_violations": {"neverending-story": 3}})
    store = _load(bundle)
    for entry in bundle.manifest["violations"]:
        number = int(entry["artifact"].rsplit("/", 1)[1])
        issue_id = store.find_nodes("Issue", "number", number)[0]
        titles = set()
        for _, event_id in store.neighbors(issue_id, "issue", "in"):
            event = store.node(event_id)
            if event.properties.get("event") == "milestoned":
                titles.add(event.properties["milestone_title"])
        assert len(titles) >= 3


def test_duplicate_injection_pairs_cross_threshold():
    bundle = generate_fixture(3, {**SMALL, "injected_violations": {"lottie-and-lisa": 2}})
    by_number = {issue["number"]: issue for issue in bundle.issues["issues"]}
    entries = [v for v in bundle.manifest["violations"] if v["metric"] == "lottie-and-lisa"]
    assert len(entries) == 2
    for entry in entries:
        number = int(entry["artifact"].rsplit("/", 1)[1])
        copy = by_number[number]
        original = by_number[number - 1]
        assert jaccard(title_tokens(copy["title"]), title_tokens(original["title"])) >= 0.6


def test_background_titles_stay_below_duplicate_threshold():
    bundle = generate_fixture(17, {"teams": 2, "sprints": 2, "stories": 60, "commits": 20})
    backlogs: dict[tuple, list] = {}
    for issue in bundle.issues["issues"]:
        team = next(l for l in issue["labels"] if l.startswith("team-"))
        for event in issue["events"]:
            if event["event"] == "milestoned":
                backlogs.setdefault((team, event["milestone_title"]), []).append(
                    title_tokens(issue["title"])
                )
    for tokens in backlogs.values():
        for i in range(len(tokens)):
            for j in range(i + 1, len(tokens)):
                assert jaccard(tokens[i], tokens[j]) < 0.6


def test_fixture_loads_and_extracts_cleanly():
    bundle = generate_fixture(21, SMALL)
    store = _load(bundle)
    config = ProjectConfig.from_document(bundle.config)
    sprints = extract_sprints(store, config)
    teams = extract_teams(store, config)
    assert [s.ordinal for s in sprints] == [1, 2, 3]
    assert [t.name for t in teams] == ["blue", "red"]
    # dedup invariants: one node per distinct label name / login / path
    distinct_labels = {l for issue in bundle.issues["issues"] for l in issue["labels"]}
    distinct_authors = {c["author"] for c in bundle.commits["commits"]}
    distinct_paths = {f["path"] for c in bundle.commits["commits"] for f in c["files"]}
    assert len(store.nodes_by_label("Label")) == len(distinct_labels)
    assert len(store.nodes_by_label("Developer")) == len(distinct_authors)
    assert len(store.nodes_by_label("File")) == len(distinct_paths)


def test_reload_reserializes_identically():
    bundle = generate_fixture(5, SMALL)
    store = _load(bundle)
    snapshot = store.snapshot_bytes()
    assert GraphStore.from_snapshot(json.loads(snapshot)).snapshot_bytes() == snapshot


def test_write_outputs_all_documents(tmp_path):
    bundle = generate_fixture(1, {"teams": 1, "sprints": 3, "stories": 6, "commits": 6})
    written = bundle.write(tmp_path)
    assert sorted(written) == ["commits", "config", "issues", "manifest", "test_runs"]
    for path in written.values():
        assert path.exists()

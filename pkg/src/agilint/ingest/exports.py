"""Loaders for the three export document formats.

Issue export:
    {"issues": [{"number", "title", "body", "url", "created_at", "state",
                 "labels": [...], "milestone": str|null, "estimate": num|null,
                 "events": [{"event", "milestone_title", "created_at", "actor"}]}],
     "milestones": [{"title", "due_on"}]}          # optional block

Commit export:
    {"commits": [{"sha", "message", "author", "authored_at", "parents",
                  "complexity": num|null,
                  "files": [{"path", "additions", "deletions"}]}]}

Test-run export:
    {"runs": [{"commit", "passed", "failed", "coverage": num|null}]}

Validation is explicit so every rejection carries the JSON path of the
offending field. Label, Milestone, Developer and File nodes are
deduplicated against the whole store, so repeated loads share them.
Commits additionally get derived ``files_changed`` and ``total_changes``
properties (query-side access to per-file counts without edge values).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime

from ..graph import GraphStore, parse_timestamp

_SHA_PATTERN = re.compile(r"^[0-9a-fA-F]{40}$")


class SchemaViolation(Exception):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class DuplicateIssueNumber(Exception):
    def __init__(self, number: int):
        super().__init__(f"issue number {number} already present")
        self.number = number


class DuplicateSha(Exception):
    def __init__(self, sha: str):
        super().__init__(f"commit {sha} already present")
        self.sha = sha


@dataclass
class LoadReport:
    nodes_added: int = 0
    edges_added: int = 0
    warnings: list[str] = field(default_factory=list)


# -- validation helpers -------------------------------------------------------


def _need(document, path: str, key: str, kinds, allow_none: bool = False):
    if not isinstance(document, dict):
        raise SchemaViolation(path, "expected an object")
    if key not in document:
        raise SchemaViolation(f"{path}.{key}", "missing required field")
    value = document[key]
    if value is None:
        if allow_none:
            return None
        raise SchemaViolation(f"{path}.{key}", "must not be null")
    if not isinstance(value, kinds) or isinstance(value, bool) and bool not in _as_tuple(kinds):
        raise SchemaViolation(f"{path}.{key}", f"expected {_kind_names(kinds)}")
    return value


def _as_tuple(kinds):
    return kinds if isinstance(kinds, tuple) else (kinds,)


def _kind_names(kinds) -> str:
    return "/".join(k.__name__ for k in _as_tuple(kinds))


def _timestamp(document, path: str, key: str) -> datetime:
    raw = _need(document, path, key, str)
    try:
        return parse_timestamp(raw)
    except ValueError:
        raise SchemaViolation(f"{path}.{key}", f"bad timestamp {raw!r}") from None


def _string_list(document, path: str, key: str) -> list[str]:
    raw = _need(document, path, key, list)
    for index, item in enumerate(raw):
        if not isinstance(item, str):
            raise SchemaViolation(f"{path}.{key}[{index}]", "expected str")
    return raw


# -- shared node lookups ------------------------------------------------------


def _get_or_create(store: GraphStore, label: str, key: str, value, report: LoadReport, extra=None) -> int:
    existing = store.find_nodes(label, key, value)
    if existing:
        return existing[0]
    props = {key: value}
    if extra:
        props.update(extra)
    node_id = store.add_node(label, props)
    report.nodes_added += 1
    return node_id


# -- issue export -------------------------------------------------------------

_EVENT_NEEDS_MILESTONE = ("milestoned", "demilestoned")


def load_issue_export(document: dict, store: GraphStore) -> LoadReport:
    """Load issues, their events, labels and milestones into the store."""
    report = LoadReport()
    issues = _need(document, "$", "issues", list)

    milestone_due: dict[str, datetime] = {}
    if "milestones" in document and document["milestones"] is not None:
        if not isinstance(document["milestones"], list):
            raise SchemaViolation("$.milestones", "expected list")
        for index, entry in enumerate(document["milestones"]):
            path = f"$.milestones[{index}]"
            title = _need(entry, path, "title", str)
            milestone_due[title] = _timestamp(entry, path, "due_on")

    seen_numbers: set[int] = set()
    parsed = []
    for index, entry in enumerate(issues):
        path = f"$.issues[{index}]"
        number = _need(entry, path, "number", int)
        if number <= 0:
            raise SchemaViolation(f"{path}.number", "must be positive")
        if number in seen_numbers or store.find_nodes("Issue", "number", number):
            raise DuplicateIssueNumber(number)
        seen_numbers.add(number)
        state = _need(entry, path, "state", str)
        if state not in ("open", "closed"):
            raise SchemaViolation(f"{path}.state", f"expected open/closed, got {state!r}")
        estimate = _need(entry, path, "estimate", (int, float), allow_none=True) if "estimate" in entry else None
        if estimate is not None and estimate < 0:
            raise SchemaViolation(f"{path}.estimate", "must be >= 0")
        events = []
        for event_index, event in enumerate(entry.get("events", [])):
            event_path = f"{path}.events[{event_index}]"
            event_type = _need(event, event_path, "event", str)
            milestone_title = (
                _need(event, event_path, "milestone_title", str, allow_none=True)
                if "milestone_title" in event
                else None
            )
            if event_type in _EVENT_NEEDS_MILESTONE and not milestone_title:
                raise SchemaViolation(f"{event_path}.milestone_title", f"required for {event_type!r} events")
            actor = _need(event, event_path, "actor", str, allow_none=True) if "actor" in event else None
            events.append(
                {
                    "event": event_type,
                    "milestone_title": milestone_title,
                    "created_at": _timestamp(event, event_path, "created_at"),
                    "actor": actor,
                }
            )
        parsed.append(
            {
                "number": number,
                "title": _need(entry, path, "title", str),
                "body": _need(entry, path, "body", str),
                "url": _need(entry, path, "url", str),
                "created_at": _timestamp(entry, path, "created_at"),
                "state": state,
                "labels": _string_list(entry, path, "labels"),
                "milestone": _need(entry, path, "milestone", str, allow_none=True),
                "estimate": estimate,
                "events": events,
            }
        )

    for record in parsed:
        props = {
            "number": record["number"],
            "title": record["title"],
            "body": record["body"],
            "url": record["url"],
            "created_at": record["created_at"],
            "state": record["state"],
        }
        if record["estimate"] is not None:
            props["estimate"] = float(record["estimate"])
        issue_id = store.add_node("Issue", props)
        report.nodes_added += 1

        for label_name in record["labels"]:
            label_id = _get_or_create(store, "Label", "name", label_name, report)
            store.add_edge(issue_id, "labels", label_id)
            report.edges_added += 1

        milestone_titles = {e["milestone_title"] for e in record["events"] if e["milestone_title"]}
        if record["milestone"]:
            milestone_titles.add(record["milestone"])
        milestone_ids: dict[str, int] = {}
        for title in sorted(milestone_titles):
            extra = {"due_on": milestone_due[title]} if title in milestone_due else None
            milestone_ids[title] = _get_or_create(store, "Milestone", "title", title, report, extra)

        if record["milestone"]:
            store.add_edge(issue_id, "milestone", milestone_ids[record["milestone"]])
            report.edges_added += 1

        for event in record["events"]:
            props = {"event": event["event"], "created_at": event["created_at"]}
            if event["milestone_title"]:
                props["milestone_title"] = event["milestone_title"]
            if event["actor"]:
                props["actor"] = event["actor"]
            event_id = store.add_node("Event", props)
            report.nodes_added += 1
            store.add_edge(event_id, "issue", issue_id)
            report.edges_added += 1

    # milestones listed with due dates but never referenced still materialize,
    # so sprint extraction sees every planned iteration
    for title in sorted(milestone_due):
        if not store.find_nodes("Milestone", "title", title):
            _get_or_create(store, "Milestone", "title", title, report, {"due_on": milestone_due[title]})

    return report


# -- commit export --------------------------------------------------------------


def load_commit_export(document: dict, store: GraphStore) -> LoadReport:
    """Load commits, authors, file changes, and parent links."""
    report = LoadReport()
    commits = _need(document, "$", "commits", list)

    parsed = []
    seen_shas: set[str] = set()
    for index, entry in enumerate(commits):
        path = f"$.commits[{index}]"
        sha = _need(entry, path, "sha", str).lower()
        if not _SHA_PATTERN.match(sha):
            raise SchemaViolation(f"{path}.sha", "expected 40 hex chars")
        if sha in seen_shas or store.find_nodes("Commit", "sha", sha):
            raise DuplicateSha(sha)
        seen_shas.add(sha)
        files = []
        for file_index, change in enumerate(entry.get("files", [])):
            file_path = f"{path}.files[{file_index}]"
            additions = _need(change, file_path, "additions", int)
            deletions = _need(change, file_path, "deletions", int)
            if additions < 0:
                raise SchemaViolation(f"{file_path}.additions", "must be >= 0")
            if deletions < 0:
                raise SchemaViolation(f"{file_path}.deletions", "must be >= 0")
            files.append({"path": _need(change, file_path, "path", str), "additions": additions, "deletions": deletions})
        complexity = (
            _need(entry, path, "complexity", (int, float), allow_none=True) if "complexity" in entry else None
        )
        parents = _string_list(entry, path, "parents") if "parents" in entry else []
        parsed.append(
            {
                "sha": sha,
                "message": _need(entry, path, "message", str),
                "author": _need(entry, path, "author", str),
                "authored_at": _timestamp(entry, path, "authored_at"),
                "parents": [p.lower() for p in parents],
                "complexity": complexity,
                "files": files,
            }
        )

    commit_ids: dict[str, int] = {}
    for record in parsed:
        props = {
            "sha": record["sha"],
            "message": record["message"],
            "authored_at": record["authored_at"],
            "files_changed": len(record["files"]),
            "total_changes": sum(f["additions"] + f["deletions"] for f in record["files"]),
        }
        if record["complexity"] is not None:
            props["complexity"] = float(record["complexity"])
        commit_id = store.add_node("Commit", props)
        report.nodes_added += 1
        commit_ids[record["sha"]] = commit_id

        author_id = _get_or_create(store, "Developer", "login", record["author"], report)
        store.add_edge(commit_id, "author", author_id)
        report.edges_added += 1

        for change in record["files"]:
            file_id = _get_or_create(store, "File", "path", change["path"], report)
            store.add_edge(
                commit_id,
                "changes",
                file_id,
                {"additions": change["additions"], "deletions": change["deletions"]},
            )
            report.edges_added += 1

    for record in parsed:
        for parent_sha in record["parents"]:
            parent_id = commit_ids.get(parent_sha)
            if parent_id is None:
                found = store.find_nodes("Commit", "sha", parent_sha)
                parent_id = found[0] if found else None
            if parent_id is not None:
                store.add_edge(commit_ids[record["sha"]], "parent", parent_id)
                report.edges_added += 1

    return report


# -- test runs -------------------------------------------------------------------


def load_test_runs(document: dict, store: GraphStore) -> LoadReport:
    """Load test-run statistics; unknown commit shas warn, not fail."""
    report = LoadReport()
    runs = _need(document, "$", "runs", list)
    for index, entry in enumerate(runs):
        path = f"$.runs[{index}]"
        sha = _need(entry, path, "commit", str).lower()
        passed = _need(entry, path, "passed", int)
        failed = _need(entry, path, "failed", int)
        if passed < 0:
            raise SchemaViolation(f"{path}.passed", "must be >= 0")
        if failed < 0:
            raise SchemaViolation(f"{path}.failed", "must be >= 0")
        coverage = _need(entry, path, "coverage", (int, float), allow_none=True) if "coverage" in entry else None
        if coverage is not None and not (0.0 <= float(coverage) <= 1.0):
            raise SchemaViolation(f"{path}.coverage", "must be within [0, 1]")
        props = {"commit_sha": sha, "passed": passed, "failed": failed}
        if coverage is not None:
            props["coverage"] = float(coverage)
        run_id = store.add_node("TestRun", props)
        report.nodes_added += 1
        commits = store.find_nodes("Commit", "sha", sha)
        if commits:
            store.add_edge(commits[0], "tested_by", run_id)
            report.edges_added += 1
        else:
            report.warnings.append(f"{path}: no commit {sha}, test run left detached")
    return report

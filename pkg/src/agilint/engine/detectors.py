"""Native violation detectors.

Detectors cover patterns the query language deliberately does not
express: absence of edges, text similarity, ordered streaks, and date
arithmetic. Each one takes the store plus an evaluation context and
returns a binding table shaped exactly like a query result, so scoring
treats both kinds of metric identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable

from ..graph import GraphStore
from ..ingest.project import SprintDescriptor, TeamDescriptor
from ..mql import BindingTable, NodeRef
from ..mql.evaluator import _node_ids, sort_key
from ..similarity import jaccard, title_tokens


class DetectorUnknown(Exception):
    def __init__(self, name: str):
        super().__init__(f"no native detector {name!r}")
        self.name = name


@dataclass
class DetectorContext:
    team: TeamDescriptor
    sprint: SprintDescriptor
    sprint_list: list[str]
    past_sprint_list: list[str]
    params: dict[str, float]


@dataclass(frozen=True)
class Detector:
    func: Callable
    columns: tuple


def make_table(columns: list[str], rows: list[list]) -> BindingTable:
    """Sort rows the same way the query evaluator does."""
    ordered = sorted(
        rows,
        key=lambda r: (tuple(sort_key(v) for v in r), tuple(i for v in r for i in _node_ids(v))),
    )
    return BindingTable(list(columns), ordered)


def _issue_has_label(store: GraphStore, issue_id: int, label_name: str) -> bool:
    for _, label_id in store.neighbors(issue_id, "labels", "out"):
        if store.node(label_id).properties.get("name") == label_name:
            return True
    return False


def sprint_backlog(store: GraphStore, team_label: str, sprint_title: str) -> list[int]:
    """Issues milestoned into the sprint and carrying the team label,
    ascending by node id."""
    backlog: set[int] = set()
    for event_id in store.find_nodes("Event", "milestone_title", sprint_title):
        event = store.node(event_id)
        if event.properties.get("event") != "milestoned":
            continue
        for _, issue_id in store.neighbors(event_id, "issue", "out"):
            if store.node(issue_id).label == "Issue" and _issue_has_label(store, issue_id, team_label):
                backlog.add(issue_id)
    return sorted(backlog)


def _commits_in_window(store: GraphStore, start: datetime, end: datetime) -> list[int]:
    ids = []
    for commit_id in store.nodes_by_label("Commit"):
        authored = store.node(commit_id).properties.get("authored_at")
        if isinstance(authored, datetime) and start <= authored < end:
            ids.append(commit_id)
    return ids


def _ref(store: GraphStore, node_id: int) -> NodeRef:
    return NodeRef(node_id, store.node(node_id).label)


def duplicate_stories(store: GraphStore, ctx: DetectorContext) -> BindingTable:
    """Pairs of near-duplicate story titles in the team's sprint backlog.

    The duplicate column carries the later story (higher issue number);
    one row per flagged pair.
    """
    threshold = float(ctx.params.get("sim_threshold", 0.6))
    backlog = sprint_backlog(store, ctx.team.label_name, ctx.sprint.title)
    entries = []
    for issue_id in backlog:
        props = store.node(issue_id).properties
        entries.append((props.get("number", 0), issue_id, title_tokens(props.get("title", ""))))
    entries.sort()
    rows = []
    for a_index in range(len(entries)):
        for b_index in range(a_index + 1, len(entries)):
            number_a, id_a, tokens_a = entries[a_index]
            number_b, id_b, tokens_b = entries[b_index]
            similarity = jaccard(tokens_a, tokens_b)
            if similarity >= threshold:
                rows.append([_ref(store, id_b), _ref(store, id_a), round(similarity, 4)])
    return make_table(["Duplicate", "Original", "Similarity"], rows)


def untested_commits(store: GraphStore, ctx: DetectorContext) -> BindingTable:
    """Commits in the sprint window with no test run attached."""
    rows = []
    for commit_id in _commits_in_window(store, ctx.sprint.start, ctx.sprint.end):
        if not store.neighbors(commit_id, "tested_by", "out"):
            rows.append([_ref(store, commit_id), store.node(commit_id).properties.get("authored_at")])
    return make_table(["Commits", "AuthoredAt"], rows)


def _commit_failing(store: GraphStore, commit_id: int) -> bool:
    runs = store.neighbors(commit_id, "tested_by", "out")
    if not runs:
        return False
    return any(store.node(run_id).properties.get("failed", 0) > 0 for _, run_id in runs)


def failing_streaks(store: GraphStore, ctx: DetectorContext) -> BindingTable:
    """Maximal runs of consecutive failing commits (time order) of at
    least ``streak_threshold`` commits."""
    threshold = int(ctx.params.get("streak_threshold", 3))
    window = _commits_in_window(store, ctx.sprint.start, ctx.sprint.end)
    window.sort(key=lambda cid: (store.node(cid).properties.get("authored_at"), store.node(cid).properties.get("sha", "")))
    rows = []
    streak: list[int] = []
    for commit_id in window + [None]:
        if commit_id is not None and _commit_failing(store, commit_id):
            streak.append(commit_id)
            continue
        if len(streak) >= threshold:
            rows.append([_ref(store, streak[0]), len(streak)])
        streak = []
    return make_table(["StreakStart", "Length"], rows)


def sprint_end_rush(store: GraphStore, ctx: DetectorContext) -> BindingTable:
    """Commits authored within the final ``rush_hours`` of the sprint."""
    rush_hours = float(ctx.params.get("rush_hours", 24))
    cutoff = ctx.sprint.end - timedelta(hours=rush_hours)
    rows = []
    for commit_id in _commits_in_window(store, ctx.sprint.start, ctx.sprint.end):
        authored = store.node(commit_id).properties.get("authored_at")
        if authored >= cutoff:
            rows.append([_ref(store, commit_id), authored])
    return make_table(["Commits", "AuthoredAt"], rows)


DETECTORS: dict[str, Detector] = {
    "duplicate_stories": Detector(duplicate_stories, ("Duplicate", "Original", "Similarity")),
    "untested_commits": Detector(untested_commits, ("Commits", "AuthoredAt")),
    "failing_streaks": Detector(failing_streaks, ("StreakStart", "Length")),
    "sprint_end_rush": Detector(sprint_end_rush, ("Commits", "AuthoredAt")),
}


def run_detector(name: str, store: GraphStore, ctx: DetectorContext) -> BindingTable:
    detector = DETECTORS.get(name)
    if detector is None:
        raise DetectorUnknown(name)
    return detector.func(store, ctx)

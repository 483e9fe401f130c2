"""Sprint and team extraction from the loaded graph.

Teams are labels carrying a configurable prefix (default ``team-``).
Sprints are milestones whose title matches a pattern with one numeric
capture (default ``Sprint\\s*(\\d+)``); the capture is the ordinal.
Windows come from explicitly configured ranges when present, otherwise
each sprint ends at its milestone's due date (falling back to the
latest ``milestoned`` event naming it) and starts where the previous
sprint ended; the first sprint starts at the earliest artifact
timestamp in the store.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timedelta

from ..graph import GraphStore, parse_timestamp


class InvalidConfig(Exception):
    pass


class AmbiguousSprintTitles(Exception):
    def __init__(self, ordinal: int, titles: list[str]):
        super().__init__(f"sprint ordinal {ordinal} claimed by {titles}")
        self.ordinal = ordinal
        self.titles = titles


@dataclass
class SprintDescriptor:
    title: str
    ordinal: int
    start: datetime
    end: datetime


@dataclass
class TeamDescriptor:
    name: str
    label_name: str


@dataclass
class ProjectConfig:
    team_label_prefix: str = "team-"
    sprint_title_pattern: str = r"Sprint\s*(\d+)"
    sprint_window: list[dict] | None = None

    def compiled_pattern(self) -> re.Pattern:
        try:
            pattern = re.compile(self.sprint_title_pattern)
        except re.error as exc:
            raise InvalidConfig(f"sprint_title_pattern does not compile: {exc}") from None
        if pattern.groups != 1:
            raise InvalidConfig("sprint_title_pattern needs exactly one capture group")
        return pattern

    def explicit_windows(self) -> list[dict] | None:
        if self.sprint_window is None:
            return None
        windows = []
        for index, entry in enumerate(self.sprint_window):
            try:
                windows.append(
                    {
                        "title": entry["title"],
                        "start": _as_ts(entry["start"]),
                        "end": _as_ts(entry["end"]),
                    }
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise InvalidConfig(f"sprint_window[{index}]: {exc}") from None
        for window in windows:
            if window["start"] >= window["end"]:
                raise InvalidConfig(f"sprint window {window['title']!r} is empty")
        for earlier, later in zip(windows, windows[1:]):
            if earlier["end"] > later["start"]:
                raise InvalidConfig("sprint windows overlap or are out of order")
        return windows

    @classmethod
    def from_document(cls, document: dict) -> "ProjectConfig":
        config = cls(
            team_label_prefix=document.get("team_label_prefix", "team-"),
            sprint_title_pattern=document.get("sprint_title_pattern", r"Sprint\s*(\d+)"),
            sprint_window=document.get("sprint_window"),
        )
        config.compiled_pattern()
        config.explicit_windows()
        return config

    def to_document(self) -> dict:
        document = {
            "team_label_prefix": self.team_label_prefix,
            "sprint_title_pattern": self.sprint_title_pattern,
        }
        if self.sprint_window is not None:
            document["sprint_window"] = self.sprint_window
        return document


def _as_ts(value) -> datetime:
    if isinstance(value, datetime):
        return value
    return parse_timestamp(value)


_TIMESTAMP_KEYS = ("created_at", "authored_at", "due_on")


def _earliest_artifact_timestamp(store: GraphStore) -> datetime | None:
    earliest: datetime | None = None
    for node in store.nodes():
        for key in _TIMESTAMP_KEYS:
            value = node.properties.get(key)
            if isinstance(value, datetime) and (earliest is None or value < earliest):
                earliest = value
    return earliest


def _latest_milestoned_event(store: GraphStore, title: str) -> datetime | None:
    latest: datetime | None = None
    for node_id in store.find_nodes("Event", "milestone_title", title):
        node = store.node(node_id)
        if node.properties.get("event") != "milestoned":
            continue
        stamp = node.properties.get("created_at")
        if isinstance(stamp, datetime) and (latest is None or stamp > latest):
            latest = stamp
    return latest


def extract_sprints(store: GraphStore, config: ProjectConfig) -> list[SprintDescriptor]:
    """Ordered sprint descriptors for the store's milestones."""
    pattern = config.compiled_pattern()
    explicit = config.explicit_windows()

    matched: dict[int, tuple[str, int]] = {}
    titles_by_ordinal: dict[int, list[str]] = {}
    for node_id in store.nodes_by_label("Milestone"):
        title = store.node(node_id).properties.get("title")
        if not isinstance(title, str):
            continue
        found = pattern.search(title)
        if not found:
            continue
        ordinal = int(found.group(1))
        titles_by_ordinal.setdefault(ordinal, []).append(title)
        matched[ordinal] = (title, node_id)
    for ordinal, titles in titles_by_ordinal.items():
        if len(titles) > 1:
            raise AmbiguousSprintTitles(ordinal, sorted(titles))

    if explicit is not None:
        window_by_title = {w["title"]: w for w in explicit}
        descriptors = []
        for position, window in enumerate(explicit):
            found = pattern.search(window["title"])
            ordinal = int(found.group(1)) if found else position + 1
            descriptors.append(
                SprintDescriptor(window["title"], ordinal, window["start"], window["end"])
            )
        descriptors.sort(key=lambda d: d.ordinal)
        return descriptors

    ordered = sorted(matched.items())
    descriptors: list[SprintDescriptor] = []
    previous_end: datetime | None = None
    for ordinal, (title, node_id) in ordered:
        due = store.node(node_id).properties.get("due_on")
        end = due if isinstance(due, datetime) else _latest_milestoned_event(store, title)
        if end is None:
            raise InvalidConfig(
                f"cannot derive a window for {title!r}: no due date and no milestoned events"
            )
        if previous_end is not None:
            start = previous_end
        else:
            start = _earliest_artifact_timestamp(store) or end - timedelta(days=14)
            if start >= end:
                start = end - timedelta(days=14)
        descriptors.append(SprintDescriptor(title, ordinal, start, end))
        previous_end = end

    for earlier, later in zip(descriptors, descriptors[1:]):
        if earlier.end >= later.end:
            raise InvalidConfig(
                f"sprint ends out of order: {earlier.title!r} does not end before {later.title!r}"
            )
    return descriptors


def extract_teams(store: GraphStore, config: ProjectConfig) -> list[TeamDescriptor]:
    """One descriptor per label with the team prefix, sorted by name."""
    prefix = config.team_label_prefix
    teams = []
    for node_id in store.nodes_by_label("Label"):
        name = store.node(node_id).properties.get("name")
        if isinstance(name, str) and name.startswith(prefix):
            teams.append(TeamDescriptor(name[len(prefix):], name))
    teams.sort(key=lambda t: t.name)
    return teams


from __future__ import annotations

import pytest

from agilint.graph import GraphStore


NEVERENDING_QUERY = """MATCH (e:Event)-[:issue]-(i:Issue)-[:labels]-(l:Label)
WHERE e.event = "milestoned" AND e.milestone_title IN [{sprint_list}] AND l.name = {team}
WITH i, collect(DISTINCT e.milestone_title) AS Sprints
WITH i, Sprints, length(Sprints) AS InSprints
WHERE InSprints > {threshold}
RETURN i AS Issues, InSprints, Sprints"""


def build_neverending_store() -> GraphStore:
    """Hand-built 12-node store: issue #4 carried through three sprints,
    issue #9 in one sprint, both labeled team-red."""
    store = GraphStore()
    story = store.add_node(
        "Issue",
        {"number": 4, "title": "story four", "body": "", "url": "https://x/4", "state": "open"},
    )
    other = store.add_node(
        "Issue",
        {"number": 9, "title": "story nine", "body": "", "url": "https://x/9", "state": "open"},
    )
    team = store.add_node("Label", {"name": "team-red"})
    store.add_edge(story, "labels", team)
    store.add_edge(other, "labels", team)
    for title in ("Sprint 01", "Sprint 02", "Sprint 03"):
        milestone = store.add_node("Milestone", {"title": title})
        event = store.add_node("Event", {"event": "milestoned", "milestone_title": title})
        store.add_edge(event, "issue", story)
        if title == "Sprint 03":
            store.add_edge(story, "milestone", milestone)
    event = store.add_node("Event", {"event": "milestoned", "milestone_title": "Sprint 03"})
    store.add_edge(event, "issue", other)
    store.add_edge(other, "milestone", store.find_nodes("Milestone", "title", "Sprint 03")[0])
    bug = store.add_node("Label", {"name": "bug"})
    store.add_edge(story, "labels", bug)
    closed = store.add_node("Event", {"event": "closed"})
    store.add_edge(closed, "issue", other)
    assert store.node_count == 12
    return store


@pytest.fixture
def neverending_store() -> GraphStore:
    return build_neverending_store()


@pytest.fixture
def flagship_bindings() -> dict:
    return {
        "team": "team-red",
        "sprint_list": ["Sprint 01", "Sprint 02", "Sprint 03"],
        "threshold": 2,
    }

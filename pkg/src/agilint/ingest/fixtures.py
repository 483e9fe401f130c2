"""Synthetic export generator with injected ground-truth violations.

The generated background is clean by construction: with default metric
parameters, every bundled metric scores a perfect 100 on it. Each key of
``injected_violations`` then plants exactly that many violation
instances and records them in the manifest, so detector recall and
precision can be measured against known ground truth.

Injection keys (dashes and underscores both accepted):

    neverending-story    story milestoned into the last three sprints
    monster-stories      story with an oversized estimate
    lottie-and-lisa      near-duplicate story pair (manifest lists the copy)
    untested-commit      commit without a test run
    giant-commit         commit touching more files than the threshold
    sprint-end-rush      commit inside the final day of the sprint
    broken-build-streak  three consecutive commits with failing runs
    silent-story         story whose only event is its assignment
    stale-story          open story still assigned to the previous sprint
    lone-wolf            developer with an outsized commit count

A count may be an int (spread over teams round-robin) or a map of team
name to count. Commit-based metrics have no team attribution; their
per-team counts simply sum. Everything is deterministic for a seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from random import Random

from ..similarity import jaccard, title_tokens
from .project import ProjectConfig

_BASE_DATE = datetime(2025, 9, 1, tzinfo=timezone.utc)
_SPRINT_DAYS = 14
_RUSH_CLEARANCE_HOURS = 26  # background commits stay clear of the rush window

_TEAM_COLORS = (
    "red", "blue", "green", "amber", "violet", "teal", "coral", "indigo",
    "olive", "maroon", "navy", "mint", "gold", "plum", "slate", "rust",
    "cyan", "lime", "rose", "gray",
)
_PERSONAS = ("customer", "clerk", "moderator", "analyst", "visitor", "manager", "operator", "auditor", "owner")
_VERBS = (
    "review", "export", "archive", "filter", "merge", "schedule", "annotate",
    "translate", "publish", "restore", "compare", "validate", "bookmark",
    "subscribe", "download", "duplicate", "reorder", "preview",
)
_ADJECTIVES = (
    "pending", "weekly", "archived", "shared", "private", "starred", "recent",
    "expired", "draft", "merged", "flagged", "nested", "remote", "cached",
    "billing", "legacy", "upstream", "inbound", "partial", "combined",
)
_NOUNS = (
    "invoices", "reports", "tickets", "profiles", "dashboards", "receipts",
    "messages", "contracts", "orders", "payments", "channels", "snapshots",
    "templates", "sessions", "folders", "datasets", "reviews", "alerts",
    "batches", "widgets",
)
_AREAS = ("api", "core", "ui", "data", "infra", "auth", "jobs", "billing")

_INJECTION_KEYS = (
    "neverending-story",
    "monster-stories",
    "lottie-and-lisa",
    "untested-commit",
    "giant-commit",
    "sprint-end-rush",
    "broken-build-streak",
    "silent-story",
    "stale-story",
    "lone-wolf",
)

# detector defaults the clean background must respect
_DUPLICATE_THRESHOLD = 0.6
_DUPLICATE_MARGIN = 0.55
_MAX_BACKGROUND_FILES = 19  # stays below the giant-commit default threshold
_MONSTER_ESTIMATES = (13, 15, 18, 20)


@dataclass
class FixtureScale:
    teams: int = 5
    sprints: int = 4
    stories: int = 379
    commits: int = 1802
    injected_violations: dict = field(default_factory=dict)

    @classmethod
    def from_document(cls, document: dict) -> "FixtureScale":
        scale = cls(
            teams=document.get("teams", 5),
            sprints=document.get("sprints", 4),
            stories=document.get("stories", 379),
            commits=document.get("commits", 1802),
            injected_violations=document.get("injected_violations", {}),
        )
        for name in ("teams", "sprints", "stories", "commits"):
            if getattr(scale, name) < 0:
                raise ValueError(f"scale.{name} must be >= 0")
        return scale


@dataclass
class FixtureBundle:
    issues: dict
    commits: dict
    test_runs: dict
    config: dict
    manifest: dict

    def write(self, directory: str | Path) -> dict[str, Path]:
        target = Path(directory)
        target.mkdir(parents=True, exist_ok=True)
        written = {}
        for name, document in (
            ("issues", self.issues),
            ("commits", self.commits),
            ("test_runs", self.test_runs),
            ("config", self.config),
            ("manifest", self.manifest),
        ):
            path = target / f"{name}.json"
            path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
            written[name] = path
        return written


def _normalize_injections(raw: dict, team_names: list[str]) -> dict[str, dict[str, int]]:
    """-> {metric id: {team name: count}}"""
    normalized: dict[str, dict[str, int]] = {}
    for key, value in (raw or {}).items():
        metric = key.replace("_", "-")
        if metric not in _INJECTION_KEYS:
            raise ValueError(f"unknown injection key {key!r}")
        per_team: dict[str, int] = {}
        if isinstance(value, int):
            if not team_names:
                raise ValueError(f"cannot inject {metric!r} without teams")
            for index in range(value):
                team = team_names[index % len(team_names)]
                per_team[team] = per_team.get(team, 0) + 1
        elif isinstance(value, dict):
            for team, count in value.items():
                name = team[len("team-"):] if team.startswith("team-") else team
                if name not in team_names:
                    raise ValueError(f"injection for unknown team {team!r}")
                per_team[name] = per_team.get(name, 0) + int(count)
        else:
            raise ValueError(f"injection count for {key!r} must be int or map")
        if per_team:
            normalized[metric] = per_team
    return normalized


class _Generator:
    def __init__(self, seed: int, scale: FixtureScale):
        self.rng = Random(seed)
        self.scale = scale
        self.team_names = [
            _TEAM_COLORS[i] if i < len(_TEAM_COLORS) else f"x{i + 1:02d}"
            for i in range(scale.teams)
        ]
        self.sprint_titles = [f"Sprint {i + 1:02d}" for i in range(scale.sprints)]
        self.windows = [
            (
                _BASE_DATE + timedelta(days=_SPRINT_DAYS * i),
                _BASE_DATE + timedelta(days=_SPRINT_DAYS * (i + 1)),
            )
            for i in range(scale.sprints)
        ]
        self.issues: list[dict] = []
        self.commits: list[dict] = []
        self.runs: list[dict] = []
        self.manifest: list[dict] = []
        self.next_number = 1
        self.title_counter = 0
        self.commit_counter = 0
        self.backlog_tokens: dict[tuple[str, str], list[frozenset]] = {}
        # the first two hours of each sprint are reserved for injected
        # commits, so background commits can never interleave with them
        self.injection_cursor: dict[int, int] = {}
        self.wolf_counter = 0
        self.devs = [f"dev{i:02d}" for i in range(max(4, scale.teams * 8))]
        self.file_pool = [
            f"src/{_AREAS[i % len(_AREAS)]}/{_NOUNS[i % len(_NOUNS)]}_{i:03d}.py"
            for i in range(600)
        ]

    # -- helpers ---------------------------------------------------------

    def _url(self, number: int) -> str:
        return f"https://git.example.com/acme/project/issues/{number}"

    def _fresh_title(self, backlog_keys: list[tuple[str, str]]) -> str:
        adj = _ADJECTIVES[self.title_counter // len(_NOUNS) % len(_ADJECTIVES)]
        noun = _NOUNS[self.title_counter % len(_NOUNS)]
        self.title_counter += 1
        persona = self.rng.choice(_PERSONAS)
        verb = self.rng.choice(_VERBS)
        title = f"As a {persona} I want to {verb} the {adj} {noun}"
        backlogs = [self.backlog_tokens.setdefault(key, []) for key in backlog_keys]
        tokens = title_tokens(title)
        bump = 0
        while any(
            jaccard(tokens, seen) >= _DUPLICATE_MARGIN for backlog in backlogs for seen in backlog
        ):
            bump += 1
            title = f"{title} v{self.title_counter}{bump}"
            tokens = title_tokens(title)
        for backlog in backlogs:
            backlog.append(tokens)
        return title

    def _body(self, verb: str) -> str:
        lines = [f"Acceptance criteria for this story:"]
        for item in self.rng.sample(_NOUNS, 3):
            lines.append(f"- {verb} handles {item} correctly")
        return "\n".join(lines)

    def _sha(self) -> str:
        prefix = f"{self.commit_counter:08x}"
        self.commit_counter += 1
        suffix = "".join(self.rng.choice("0123456789abcdef") for _ in range(32))
        return prefix + suffix

    def _iso(self, stamp: datetime) -> str:
        return stamp.strftime("%Y-%m-%dT%H:%M:%SZ")

    def _story(
        self,
        team: str,
        sprint_index: int,
        *,
        estimate=None,
        title: str | None = None,
        extra_sprints: tuple[int, ...] = (),
        silent: bool = False,
        state: str | None = None,
        register_title: bool = True,
    ) -> dict:
        """Build one issue record assigned to ``sprint_index`` (plus
        earlier ``extra_sprints`` for carried-over stories)."""
        sprint_title = self.sprint_titles[sprint_index]
        number = self.next_number
        self.next_number += 1
        backlog_keys = [(team, self.sprint_titles[idx]) for idx in (*extra_sprints, sprint_index)]
        if title is None:
            title = self._fresh_title(backlog_keys)
        elif register_title:
            for key in backlog_keys:
                self.backlog_tokens.setdefault(key, []).append(title_tokens(title))
        start, end = self.windows[sprint_index]
        created = self.windows[extra_sprints[0]][0] if extra_sprints else start
        created -= timedelta(days=self.rng.randint(0, 4), hours=self.rng.randint(1, 12))
        events = []
        assignments = [*extra_sprints, sprint_index]
        for position, idx in enumerate(assignments):
            assigned_at = self.windows[idx][0] + timedelta(minutes=self.rng.randint(5, 120))
            if position > 0:
                events.append(
                    {
                        "event": "demilestoned",
                        "milestone_title": self.sprint_titles[assignments[position - 1]],
                        "created_at": self._iso(assigned_at - timedelta(minutes=2)),
                        "actor": self.rng.choice(self.devs),
                    }
                )
            events.append(
                {
                    "event": "milestoned",
                    "milestone_title": self.sprint_titles[idx],
                    "created_at": self._iso(assigned_at),
                    "actor": self.rng.choice(self.devs),
                }
            )
        if state is None:
            state = "closed" if sprint_index < self.scale.sprints - 1 else self.rng.choice(("open", "closed"))
        if not silent:
            for _ in range(self.rng.randint(1, 3)):
                at = start + timedelta(hours=self.rng.randint(2, _SPRINT_DAYS * 24 - 2))
                events.append(
                    {
                        "event": "renamed",
                        "milestone_title": None,
                        "created_at": self._iso(at),
                        "actor": self.rng.choice(self.devs),
                    }
                )
            if state == "closed":
                events.append(
                    {
                        "event": "closed",
                        "milestone_title": None,
                        "created_at": self._iso(end - timedelta(hours=self.rng.randint(1, 20))),
                        "actor": self.rng.choice(self.devs),
                    }
                )
        verb = self.rng.choice(_VERBS)
        record = {
            "number": number,
            "title": title,
            "body": self._body(verb),
            "url": self._url(number),
            "created_at": self._iso(created),
            "state": state,
            "labels": [f"team-{team}"] + (["enhancement"] if number % 3 == 0 else []),
            "milestone": sprint_title,
            "estimate": estimate if estimate is not None else self.rng.choice((1, 2, 3, 5, 8)),
            "events": events,
        }
        self.issues.append(record)
        return record

    def _commit(
        self,
        at: datetime,
        author: str,
        *,
        file_count: int | None = None,
        tested: bool = True,
        failed: int = 0,
        parent: str | None = None,
    ) -> dict:
        if file_count is None:
            # mean ~14.5 files per commit, echoing real course scale
            file_count = self.rng.randint(10, _MAX_BACKGROUND_FILES)
        paths = self.rng.sample(self.file_pool, min(file_count, len(self.file_pool)))
        sha = self._sha()
        record = {
            "sha": sha,
            "message": f"{self.rng.choice(_VERBS)} {self.rng.choice(_NOUNS)} ({sha[:7]})",
            "author": author,
            "authored_at": self._iso(at),
            "parents": [parent] if parent else [],
            "complexity": round(self.rng.uniform(1.0, 9.0), 2) if self.rng.random() < 0.8 else None,
            "files": [
                {
                    "path": path,
                    "additions": self.rng.randint(1, 120),
                    "deletions": self.rng.randint(0, 60),
                }
                for path in paths
            ],
        }
        self.commits.append(record)
        if tested:
            self.runs.append(
                {
                    "commit": sha,
                    "passed": self.rng.randint(40, 220),
                    "failed": failed,
                    "coverage": round(self.rng.uniform(0.55, 0.97), 3),
                }
            )
        return record

    # -- background ------------------------------------------------------

    def build_background(self) -> None:
        if not self.team_names or not self.sprint_titles:
            return
        slots = [
            (sprint, team)
            for sprint in range(self.scale.sprints)
            for team in self.team_names
        ]
        for index in range(self.scale.stories):
            sprint, team = slots[index % len(slots)]
            self._story(team, sprint)

        per_sprint = self.scale.commits // self.scale.sprints
        remainder = self.scale.commits % self.scale.sprints
        dev_cursor = 0
        previous_sha: str | None = None
        for sprint_index in range(self.scale.sprints):
            count = per_sprint + (1 if sprint_index < remainder else 0)
            band_start, band_span = self._background_band(sprint_index)
            for position in range(count):
                at = band_start + band_span * (position + 1) / (count + 1)
                author = self.devs[dev_cursor % len(self.devs)]
                dev_cursor += 1
                record = self._commit(at.replace(microsecond=0), author, parent=previous_sha)
                previous_sha = record["sha"]

    # -- injections --------------------------------------------------------

    def inject(self, injections: dict[str, dict[str, int]]) -> None:
        last = self.scale.sprints - 1
        for metric in _INJECTION_KEYS:
            per_team = injections.get(metric)
            if not per_team:
                continue
            for team in sorted(per_team):
                for _ in range(per_team[team]):
                    artifact = self._inject_one(metric, team, last)
                    self.manifest.append({"metric": metric, "artifact": artifact})

    def _background_band(self, sprint_index: int) -> tuple[datetime, timedelta]:
        start, end = self.windows[sprint_index]
        band_start = start + timedelta(hours=2)
        return band_start, (end - timedelta(hours=_RUSH_CLEARANCE_HOURS)) - band_start

    def _injection_slot(self, sprint_index: int) -> datetime:
        """Next free slot in the sprint's reserved injection band."""
        cursor = self.injection_cursor.get(sprint_index, 0)
        self.injection_cursor[sprint_index] = cursor + 1
        return self.windows[sprint_index][0] + timedelta(minutes=5 + 2 * cursor)

    def _inject_one(self, metric: str, team: str, last: int) -> str:
        if metric == "neverending-story":
            if self.scale.sprints < 3:
                raise ValueError("neverending-story injection needs at least 3 sprints")
            record = self._story(team, last, extra_sprints=(last - 2, last - 1))
            return record["url"]
        if metric == "monster-stories":
            record = self._story(team, last, estimate=self.rng.choice(_MONSTER_ESTIMATES))
            return record["url"]
        if metric == "lottie-and-lisa":
            original = self._story(team, last)
            copy = self._story(team, last, title=original["title"] + " again")
            return copy["url"]
        if metric == "silent-story":
            record = self._story(team, last, silent=True, state="open")
            return record["url"]
        if metric == "stale-story":
            if self.scale.sprints < 2:
                raise ValueError("stale-story injection needs at least 2 sprints")
            record = self._story(team, last - 1, state="open")
            return record["url"]
        if metric == "untested-commit":
            record = self._commit(self._injection_slot(last), self.rng.choice(self.devs), tested=False)
            return record["sha"]
        if metric == "giant-commit":
            record = self._commit(
                self._injection_slot(last), self.rng.choice(self.devs), file_count=self.rng.randint(26, 34)
            )
            return record["sha"]
        if metric == "sprint-end-rush":
            start, end = self.windows[last]
            at = end - timedelta(hours=self.rng.randint(2, 20), minutes=self.rng.randint(0, 59))
            record = self._commit(at.replace(microsecond=0), self.rng.choice(self.devs))
            return record["sha"]
        if metric == "broken-build-streak":
            base = self._injection_slot(last)
            first = None
            for offset in range(3):
                record = self._commit(
                    base + timedelta(seconds=10 * offset),
                    self.rng.choice(self.devs),
                    failed=self.rng.randint(1, 9),
                )
                first = first or record["sha"]
            # a green commit right after keeps two injected streaks from merging
            self._commit(base + timedelta(seconds=40), self.rng.choice(self.devs))
            return first
        if metric == "lone-wolf":
            self.wolf_counter += 1
            wolf = f"wolf{self.wolf_counter:03d}"
            band_start, band_span = self._background_band(last)
            for position in range(35):
                at = band_start + band_span * (position + 1) / 37 + timedelta(seconds=7)
                self._commit(at.replace(microsecond=0), wolf, file_count=4)
            return wolf
        raise AssertionError(metric)

    # -- assembly ----------------------------------------------------------

    def bundle(self) -> FixtureBundle:
        milestones = [
            {"title": title, "due_on": self._iso(self.windows[index][1])}
            for index, title in enumerate(self.sprint_titles)
        ]
        config = ProjectConfig().to_document()
        manifest = sorted(self.manifest, key=lambda v: (v["metric"], v["artifact"]))
        return FixtureBundle(
            issues={"issues": self.issues, "milestones": milestones},
            commits={"commits": self.commits},
            test_runs={"runs": self.runs},
            config=config,
            manifest={"violations": manifest},
        )


def generate_fixture(seed: int, scale: FixtureScale | dict | None = None) -> FixtureBundle:
    """Deterministic export documents plus a ground-truth manifest."""
    if scale is None:
        scale = FixtureScale()
    elif isinstance(scale, dict):
        scale = FixtureScale.from_document(scale)
    generator = _Generator(seed, scale)
    injections = _normalize_injections(scale.injected_violations, generator.team_names)
    generator.build_background()
    generator.inject(injections)
    return generator.bundle()

"""Optional forge client: pulls issues and commits from a GitHub-style
REST API and writes the same export documents the file-based path loads.

The client never touches the graph; it is a producer of export files.
Tests drive it through an injected ``httpx`` transport, so nothing here
needs real network access.
"""

from __future__ import annotations

import json
from pathlib import Path

import httpx


class AuthFailure(Exception):
    pass


class RateLimited(Exception):
    def __init__(self, retry_after: float | None):
        super().__init__(f"rate limited, retry after {retry_after}s")
        self.retry_after = retry_after


class NetworkError(Exception):
    pass


def _check(response: httpx.Response) -> httpx.Response:
    if response.status_code in (401,):
        raise AuthFailure(f"{response.request.url}: HTTP {response.status_code}")
    if response.status_code in (403, 429):
        retry_after = response.headers.get("Retry-After")
        if retry_after is not None or response.headers.get("X-RateLimit-Remaining") == "0":
            raise RateLimited(float(retry_after) if retry_after else None)
        raise AuthFailure(f"{response.request.url}: HTTP 403")
    if response.status_code >= 400:
        raise NetworkError(f"{response.request.url}: HTTP {response.status_code}")
    return response


def _paged(client: httpx.Client, url: str, params: dict | None = None) -> list:
    results: list = []
    page = 1
    while True:
        query = {"per_page": 100, "page": page}
        if params:
            query.update(params)
        try:
            response = _check(client.get(url, params=query))
        except httpx.HTTPError as exc:
            raise NetworkError(str(exc)) from None
        batch = response.json()
        if not isinstance(batch, list):
            raise NetworkError(f"{url}: expected a JSON array")
        results.extend(batch)
        if len(batch) < 100:
            return results
        page += 1


def _issue_record(client: httpx.Client, base: str, raw: dict) -> dict:
    events = []
    for event in _paged(client, f"{base}/issues/{raw['number']}/events"):
        milestone = event.get("milestone") or {}
        events.append(
            {
                "event": event.get("event", ""),
                "milestone_title": milestone.get("title"),
                "created_at": event.get("created_at"),
                "actor": (event.get("actor") or {}).get("login"),
            }
        )
    milestone = raw.get("milestone") or {}
    return {
        "number": raw["number"],
        "title": raw.get("title", ""),
        "body": raw.get("body") or "",
        "url": raw.get("html_url", ""),
        "created_at": raw.get("created_at"),
        "state": raw.get("state", "open"),
        "labels": [label["name"] for label in raw.get("labels", [])],
        "milestone": milestone.get("title"),
        "estimate": None,
        "events": events,
    }


def _commit_record(client: httpx.Client, base: str, raw: dict) -> dict:
    try:
        detail = _check(client.get(f"{base}/commits/{raw['sha']}")).json()
    except httpx.HTTPError as exc:
        raise NetworkError(str(exc)) from None
    commit = detail.get("commit", {})
    author = detail.get("author") or {}
    return {
        "sha": detail["sha"],
        "message": commit.get("message", ""),
        "author": author.get("login") or commit.get("author", {}).get("name", "unknown"),
        "authored_at": commit.get("author", {}).get("date"),
        "parents": [parent["sha"] for parent in detail.get("parents", [])],
        "complexity": None,
        "files": [
            {
                "path": change.get("filename", ""),
                "additions": change.get("additions", 0),
                "deletions": change.get("deletions", 0),
            }
            for change in detail.get("files", [])
        ],
    }


def fetch_remote(
    repo: str,
    token: str | None,
    output_dir: str | Path,
    api_base: str = "https://api.github.com",
    transport: httpx.BaseTransport | None = None,
) -> dict[str, Path]:
    """Fetch ``owner/name`` exports and write issues.json / commits.json.

    Returns the written paths. Raises AuthFailure, RateLimited, or
    NetworkError; never writes partial files.
    """
    headers = {"Accept": "application/vnd.github+json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    base = f"{api_base}/repos/{repo}"
    output = Path(output_dir)
    output.mkdir(parents=True, exist_ok=True)

    with httpx.Client(headers=headers, transport=transport, timeout=30.0) as client:
        try:
            raw_issues = _paged(client, f"{base}/issues", {"state": "all"})
            raw_commits = _paged(client, f"{base}/commits")
        except httpx.HTTPError as exc:
            raise NetworkError(str(exc)) from None
        issues = [
            _issue_record(client, base, raw)
            for raw in raw_issues
            if "pull_request" not in raw
        ]
        milestones = [
            {"title": m["title"], "due_on": m["due_on"]}
            for m in _paged(client, f"{base}/milestones", {"state": "all"})
            if m.get("due_on")
        ]
        commits = [_commit_record(client, base, raw) for raw in raw_commits]

    issues_path = output / "issues.json"
    commits_path = output / "commits.json"
    issues_path.write_text(
        json.dumps({"issues": issues, "milestones": milestones}, indent=2, sort_keys=True)
    )
    commits_path.write_text(json.dumps({"commits": commits}, indent=2, sort_keys=True))
    return {"issues": issues_path, "commits": commits_path}

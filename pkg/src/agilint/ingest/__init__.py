"""Artifact ingestion: export loaders, sprint/team extraction, an
optional forge client, and the synthetic fixture generator."""

from .exports import (
    DuplicateIssueNumber,
    DuplicateSha,
    LoadReport,
    SchemaViolation,
    load_commit_export,
    load_issue_export,
    load_test_runs,
)
from .fixtures import FixtureBundle, FixtureScale, generate_fixture
from .project import (
    AmbiguousSprintTitles,
    InvalidConfig,
    ProjectConfig,
    SprintDescriptor,
    TeamDescriptor,
    extract_sprints,
    extract_teams,
)
from .remote import AuthFailure, NetworkError, RateLimited, fetch_remote

__all__ = [
    "AmbiguousSprintTitles",
    "AuthFailure",
    "DuplicateIssueNumber",
    "DuplicateSha",
    "FixtureBundle",
    "FixtureScale",
    "InvalidConfig",
    "LoadReport",
    "NetworkError",
    "ProjectConfig",
    "RateLimited",
    "SchemaViolation",
    "SprintDescriptor",
    "TeamDescriptor",
    "extract_sprints",
    "extract_teams",
    "fetch_remote",
    "generate_fixture",
    "load_commit_export",
    "load_issue_export",
    "load_test_runs",
]

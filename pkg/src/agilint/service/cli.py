"""Command line interface.

Verbs: ingest, evaluate, report, serve, validate-metrics, fixture.
Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime
error. With ``--format json``, errors also land on stderr as JSON.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..engine import (
    CatalogInvalid,
    Engine,
    EngineConfig,
    builtin_catalog,
    load_catalog_file,
    matrix_from_results,
    read_results,
    write_results,
)
from ..graph import GraphStore
from ..ingest import (
    AmbiguousSprintTitles,
    DuplicateIssueNumber,
    DuplicateSha,
    InvalidConfig,
    ProjectConfig,
    SchemaViolation,
    generate_fixture,
    load_commit_export,
    load_issue_export,
    load_test_runs,
)
from .api import create_app
from .report import build_report, report_json, report_text

_VALIDATION_ERRORS = (
    SchemaViolation,
    DuplicateIssueNumber,
    DuplicateSha,
    InvalidConfig,
    AmbiguousSprintTitles,
    CatalogInvalid,
    ValueError,
)


def _read_json(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _load_project_config(path: str | None) -> ProjectConfig:
    if path is None:
        return ProjectConfig()
    return ProjectConfig.from_document(_read_json(path))


def _load_engine_config(path: str | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    return EngineConfig.from_document(_read_json(path))


def _load_catalog(path: str | None):
    if path is None:
        return builtin_catalog()
    return load_catalog_file(path)


@click.group()
def cli():
    """Process-conformance linting over development artifacts."""


@cli.command()
@click.option("--issues", type=click.Path(exists=True, dir_okay=False), default=None, help="Issue export JSON.")
@click.option("--commits", type=click.Path(exists=True, dir_okay=False), default=None, help="Commit export JSON.")
@click.option("--tests", type=click.Path(exists=True, dir_okay=False), default=None, help="Test-run export JSON.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None, help="Project config JSON.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Snapshot file to write.")
def ingest(issues, commits, tests, config, out):
    """Load exports into a graph snapshot (issues, then commits, then tests)."""
    _load_project_config(config)  # validated for early feedback
    store = GraphStore()
    reports = []
    if issues:
        reports.append(("issues", load_issue_export(_read_json(issues), store)))
    if commits:
        reports.append(("commits", load_commit_export(_read_json(commits), store)))
    if tests:
        reports.append(("tests", load_test_runs(_read_json(tests), store)))
    store.save(out)
    for name, report in reports:
        click.echo(f"{name}: {report.nodes_added} nodes, {report.edges_added} edges")
        for warning in report.warnings:
            click.echo(f"  warning: {warning}", err=True)
    click.echo(f"snapshot {out} ({store.node_count} nodes, {store.edge_count} edges)")
    click.echo(f"data version {store.data_version()}")


@cli.command()
@click.option("--snapshot", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--catalog", type=click.Path(exists=True, dir_okay=False), default=None, help="Metric catalog (default: builtin).")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None, help="Project config JSON.")
@click.option("--service-config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--no-cache", is_flag=True, default=False, help="Bypass the result cache.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Results JSONL to write.")
def evaluate(snapshot, catalog, config, service_config, no_cache, out):
    """Evaluate every metric for every team and sprint."""
    store = GraphStore.load(snapshot)
    engine = Engine(
        store,
        _load_catalog(catalog),
        project_config=_load_project_config(config),
        config=_load_engine_config(service_config),
    )
    matrix = engine.evaluate_all(use_cache=not no_cache)
    write_results(out, matrix)
    click.echo(
        f"evaluated {len(matrix.all_results())} results "
        f"({len(matrix.teams)} teams x {len(matrix.sprints)} sprints) -> {out}"
    )


@cli.command()
@click.option("--results", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--team", default=None)
@click.option("--sprint", default=None)
@click.option("--service-config", type=click.Path(exists=True, dir_okay=False), default=None)
def report(results, fmt, team, sprint, service_config):
    """Render a report from stored results (aggregates recomputed)."""
    rows = read_results(results)
    engine_config = _load_engine_config(service_config)
    matrix = matrix_from_results(rows, engine_config.severity_weights)
    if team is not None and team not in matrix.teams:
        raise click.UsageError(f"unknown team {team!r}")
    if sprint is not None and sprint not in [s.title for s in matrix.sprints]:
        raise click.UsageError(f"unknown sprint {sprint!r}")
    document = build_report(matrix, team=team, sprint=sprint)
    if fmt == "json":
        click.echo(report_json(document), nl=False)
    else:
        click.echo(report_text(document))


@cli.command()
@click.option("--snapshot", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--catalog", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--service-config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--port", type=int, default=None, help="Override the configured port.")
@click.option("--static", type=click.Path(exists=True, file_okay=False), default=None, help="Dashboard build directory.")
def serve(snapshot, catalog, config, service_config, port, static):
    """Serve the HTTP API (and the dashboard, when built)."""
    import uvicorn

    store = GraphStore.load(snapshot)
    engine_config = _load_engine_config(service_config)
    engine = Engine(
        store,
        _load_catalog(catalog),
        project_config=_load_project_config(config),
        config=engine_config,
    )
    app = create_app(engine, static_dir=static)
    uvicorn.run(app, host="127.0.0.1", port=port or engine_config.port, log_level="warning")


@cli.command("validate-metrics")
@click.option("--catalog", type=click.Path(exists=True, dir_okay=False), default=None)
def validate_metrics(catalog):
    """Validate a metric catalog (default: the builtin one)."""
    loaded = _load_catalog(catalog)
    click.echo(f"{len(loaded.metrics)} metrics OK")


@cli.command()
@click.option("--seed", type=int, required=True)
@click.option("--scale", default=None, help="Scale JSON (inline or @file).")
@click.option("--out", type=click.Path(file_okay=False), required=True)
def fixture(seed, scale, out):
    """Generate synthetic exports plus a ground-truth manifest."""
    if scale is None:
        document = {}
    elif scale.startswith("@"):
        document = _read_json(scale[1:])
    else:
        document = json.loads(scale)
    bundle = generate_fixture(seed, document)
    written = bundle.write(out)
    click.echo(
        f"wrote {len(bundle.issues['issues'])} issues, "
        f"{len(bundle.commits['commits'])} commits, "
        f"{len(bundle.test_runs['runs'])} runs, "
        f"{len(bundle.manifest['violations'])} injected violations -> {out}"
    )
    for name, path in written.items():
        click.echo(f"  {name}: {path}")


def main() -> int:
    json_errors = "--format" in sys.argv and "json" in sys.argv

    def emit(kind: str, error: Exception):
        if json_errors:
            payload = {"error": str(error), "kind": kind}
            if isinstance(error, CatalogInvalid):
                payload["details"] = error.errors
            click.echo(json.dumps(payload), err=True)
        else:
            click.echo(f"{kind}: {error}", err=True)

    try:
        cli.main(standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        emit("usage", exc)
        return 1
    except _VALIDATION_ERRORS as exc:
        emit("validation", exc)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        emit("runtime", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())

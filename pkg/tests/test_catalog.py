from __future__ import annotations

from collections import Counter

import pytest

from agilint.engine import CatalogInvalid, builtin_catalog, load_catalog, validate_metric
from agilint.engine.catalog import updated_metric


def _minimal_metric(**overrides):
    entry = {
        "id": "sample-metric",
        "name": "Sample",
        "category": "Backlog Maintenance",
        "severity": "Low",
        "data_source": "tracker",
        "description": "sample",
        "kind": "query",
        "query": "MATCH (i:Issue) RETURN i AS Issues",
        "context_queries": {},
        "params": {},
        "rating": "max(0, 100 - violations)",
        "aliases": {},
    }
    entry.update(overrides)
    return entry


class TestBuiltinCatalog:
    def test_ten_metrics_zero_errors(self):
        catalog = builtin_catalog()
        assert len(catalog.metrics) == 10
        for metric in catalog.metrics:
            assert validate_metric(metric) == []

    def test_category_histogram(self):
        histogram = Counter(m.category for m in builtin_catalog().metrics)
        assert histogram == Counter(
            {"Backlog Maintenance": 3, "XP Practices": 3, "Developer Productivity": 4}
        )

    def test_backlog_maintenance_names(self):
        names = {
            m.name for m in builtin_catalog().metrics if m.category == "Backlog Maintenance"
        }
        assert names == {"The Neverending Story", "Monster Stories", "Lottie and Lisa"}

    def test_neverending_severity_high(self):
        assert builtin_catalog().get("neverending-story").severity == "High"

    def test_neverending_default_threshold(self):
        assert builtin_catalog().get("neverending-story").params["threshold"] == 2


class TestLoadCatalog:
    def test_valid_single_metric(self):
        catalog = load_catalog({"metrics": [_minimal_metric()]})
        assert catalog.metrics[0].id == "sample-metric"

    def test_unparseable_rating_rejected(self):
        with pytest.raises(CatalogInvalid) as excinfo:
            load_catalog({"metrics": [_minimal_metric(rating="100-(violations/totalUS")]})
        assert any(e["field"] == "rating" for e in excinfo.value.errors)

    def test_unresolvable_rating_binding_rejected(self):
        with pytest.raises(CatalogInvalid) as excinfo:
            load_catalog({"metrics": [_minimal_metric(rating="100 - AvgInSprints")]})
        assert any("AvgInSprints" in e["reason"] for e in excinfo.value.errors)

    def test_alias_makes_binding_resolvable(self):
        entry = _minimal_metric(
            query="MATCH (i:Issue) RETURN i AS Issues, i.estimate AS InSprints",
            rating="100 - AvgInSprints",
            aliases={"AvgInSprints": "avg_InSprints"},
        )
        load_catalog({"metrics": [entry]})

    def test_alias_to_undeclared_column_rejected(self):
        entry = _minimal_metric(aliases={"A": "avg_Missing"})
        with pytest.raises(CatalogInvalid):
            load_catalog({"metrics": [entry]})

    def test_unknown_placeholder_rejected(self):
        entry = _minimal_metric(query="MATCH (i:Issue) WHERE i.number > {mystery} RETURN i")
        with pytest.raises(CatalogInvalid) as excinfo:
            load_catalog({"metrics": [entry]})
        assert any("mystery" in e["reason"] for e in excinfo.value.errors)

    def test_param_placeholder_accepted(self):
        entry = _minimal_metric(
            query="MATCH (i:Issue) WHERE i.number > {floor} RETURN i", params={"floor": 3}
        )
        load_catalog({"metrics": [entry]})

    def test_unknown_detector_rejected(self):
        entry = _minimal_metric(kind="native", query="not_a_detector")
        with pytest.raises(CatalogInvalid):
            load_catalog({"metrics": [entry]})

    def test_context_query_must_return_one_column(self):
        entry = _minimal_metric(
            context_queries={"two": "MATCH (i:Issue) RETURN i, i.number AS N"}
        )
        with pytest.raises(CatalogInvalid):
            load_catalog({"metrics": [entry]})

    def test_duplicate_ids_rejected(self):
        with pytest.raises(CatalogInvalid):
            load_catalog({"metrics": [_minimal_metric(), _minimal_metric()]})

    def test_rejection_is_atomic(self):
        document = {"metrics": [_minimal_metric(), _minimal_metric(id="broken", rating="(((")]}
        with pytest.raises(CatalogInvalid):
            load_catalog(document)

    def test_bad_severity_rejected(self):
        with pytest.raises(CatalogInvalid):
            load_catalog({"metrics": [_minimal_metric(severity="Critical")]})


class TestUpdatedMetric:
    def test_revision_bumps(self):
        metric = builtin_catalog().get("neverending-story")
        newer = updated_metric(metric, {"severity": "Low"})
        assert newer.revision == metric.revision + 1
        assert newer.severity == "Low"

    def test_id_not_editable(self):
        metric = builtin_catalog().get("neverending-story")
        with pytest.raises(CatalogInvalid):
            updated_metric(metric, {"id": "renamed"})

from __future__ import annotations

from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agilint.mql import BindingTable
from agilint.scoring import (
    AliasTargetMissing,
    ArityError,
    DegenerateInput,
    NothingToAggregate,
    ParseError,
    UnknownBinding,
    UnknownFunction,
    aggregate_scores,
    eval_rating,
    parse_rating,
    rating_bindings,
    standard_bindings,
)

FLAGSHIP_RATING = "max(0, 100 - (violations / totalUS * 100 * AvgInSprints))"


class TestParseRating:
    def test_flagship_formula_parses_as_two_arg_max(self):
        expr = parse_rating(FLAGSHIP_RATING)
        assert type(expr).__name__ == "Func"
        assert expr.name == "max"
        assert len(expr.args) == 2
        assert rating_bindings(expr) == {"violations", "totalUS", "AvgInSprints"}

    def test_constant(self):
        assert eval_rating(parse_rating("100"), {}) == 100.0

    def test_arity_error(self):
        with pytest.raises(ArityError):
            parse_rating("max(1, 2, 3)")

    def test_unknown_function(self):
        with pytest.raises(UnknownFunction):
            parse_rating("sqrt(4)")

    def test_parse_error_offset(self):
        with pytest.raises(ParseError) as excinfo:
            parse_rating("100-(violations/totalUS")
        assert excinfo.value.offset == 23

    def test_unary_minus_and_pow(self):
        assert eval_rating(parse_rating("abs(-5) + pow(2, 3)"), {}) == 13.0


class TestEvalRating:
    def test_zero_violations_scores_hundred(self):
        expr = parse_rating(FLAGSHIP_RATING)
        assert eval_rating(expr, {"violations": 0, "totalUS": 10, "AvgInSprints": 0}) == 100.0

    def test_hand_computed_fifty(self):
        expr = parse_rating(FLAGSHIP_RATING)
        assert eval_rating(expr, {"violations": 2, "totalUS": 10, "AvgInSprints": 2.5}) == 50.0

    def test_clamped_zero(self):
        expr = parse_rating(FLAGSHIP_RATING)
        assert eval_rating(expr, {"violations": 10, "totalUS": 10, "AvgInSprints": 3}) == 0.0

    def test_division_by_zero_degenerates(self):
        expr = parse_rating(FLAGSHIP_RATING)
        with pytest.raises(DegenerateInput):
            eval_rating(expr, {"violations": 1, "totalUS": 0, "AvgInSprints": 1})

    def test_unknown_binding(self):
        with pytest.raises(UnknownBinding):
            eval_rating(parse_rating("nope + 1"), {})

    def test_exponential_model_stays_in_range(self):
        expr = parse_rating("100*exp(-(violations/totalUS)*AvgInSprints)")
        for violations in range(0, 11):
            score = eval_rating(expr, {"violations": violations, "totalUS": 10, "AvgInSprints": 3})
            assert 0.0 < score <= 100.0

    @given(
        st.integers(min_value=0, max_value=50),
        st.integers(min_value=1, max_value=50),
        st.floats(min_value=0, max_value=10, allow_nan=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_clamp_property(self, violations, total, average):
        expr = parse_rating(FLAGSHIP_RATING)
        score = eval_rating(expr, {"violations": violations, "totalUS": total, "AvgInSprints": average})
        assert 0.0 <= score <= 100.0

    def test_monotone_in_violations_on_grid(self):
        expr = parse_rating(FLAGSHIP_RATING)
        for total in (1, 5, 10, 20):
            for average in (0.5, 1.0, 2.0, 3.0):
                scores = [
                    eval_rating(expr, {"violations": v, "totalUS": total, "AvgInSprints": average})
                    for v in range(0, 12)
                ]
                assert scores == sorted(scores, reverse=True)


class TestStandardBindings:
    def test_empty_table(self):
        bindings = standard_bindings(BindingTable(["InSprints"], []), {"totalUS": 10}, {"threshold": 2})
        assert bindings == {"violations": 0.0, "totalUS": 10.0, "threshold": 2.0}

    def test_column_aggregates(self):
        table = BindingTable(["InSprints"], [[3], [2]])
        bindings = standard_bindings(table)
        assert bindings["violations"] == 2.0
        assert bindings["avg_InSprints"] == 2.5
        assert bindings["sum_InSprints"] == 5.0
        assert bindings["max_InSprints"] == 3.0
        assert bindings["min_InSprints"] == 2.0

    def test_alias_resolution(self):
        table = BindingTable(["InSprints"], [[3], [2]])
        bindings = standard_bindings(table, aliases={"AvgInSprints": "avg_InSprints"})
        assert bindings["AvgInSprints"] == 2.5

    def test_alias_missing_on_nonempty_table_raises(self):
        table = BindingTable(["InSprints"], [[3]])
        with pytest.raises(AliasTargetMissing):
            standard_bindings(table, aliases={"AvgInSprints": "avg_Missing"})

    def test_alias_on_empty_table_is_zero(self):
        bindings = standard_bindings(BindingTable(["InSprints"], []), aliases={"A": "avg_InSprints"})
        assert bindings["A"] == 0.0

    def test_non_numeric_columns_get_no_aggregates(self):
        table = BindingTable(["Sprints"], [[["a", "b"]]])
        bindings = standard_bindings(table)
        assert "avg_Sprints" not in bindings


class TestAggregateScores:
    def test_all_hundred(self):
        assert aggregate_scores([(100.0, 3.0), (100.0, 1.0), (100.0, 2.0)]) == 100.0

    def test_weighted_mean_example(self):
        assert aggregate_scores([(100.0, 3.0), (50.0, 1.0)]) == 87.5

    def test_single_entry_is_identity(self):
        assert aggregate_scores([(73.25, 2.0)]) == 73.25

    def test_empty_raises(self):
        with pytest.raises(NothingToAggregate):
            aggregate_scores([])

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            aggregate_scores([(50.0, 0.0)])

    def _random_entries(self, rng: Random):
        return [
            (rng.uniform(0, 100), rng.choice((1.0, 2.0, 3.0)))
            for _ in range(rng.randint(1, 12))
        ]

    def test_bounds_monotonicity_and_scale_invariance_on_1000_sets(self):
        rng = Random(99)
        for _ in range(1000):
            entries = self._random_entries(rng)
            value = aggregate_scores(entries)
            scores = [s for s, _ in entries]
            assert min(scores) - 1e-9 <= value <= max(scores) + 1e-9
            # non-decreasing in each component score
            index = rng.randrange(len(entries))
            bumped = list(entries)
            bumped[index] = (min(100.0, bumped[index][0] + rng.uniform(0, 20)), bumped[index][1])
            assert aggregate_scores(bumped) >= value - 1e-9
            # positive scaling of all weights changes nothing
            factor = rng.choice((0.5, 2.0, 7.5))
            scaled = [(s, w * factor) for s, w in entries]
            assert aggregate_scores(scaled) == pytest.approx(value, abs=1e-9)

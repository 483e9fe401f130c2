from __future__ import annotations

from collections import Counter

import pytest

from agilint.mql import (
    LexError,
    ParseError,
    ScopeError,
    output_columns,
    parse,
    query_text,
    tokenize,
)
from agilint.mql.nodes import (
    Call,
    Cmp,
    MatchClause,
    ReturnClause,
    WhereClause,
    WithClause,
    query_placeholders,
)

from conftest import NEVERENDING_QUERY


class TestTokenize:
    def test_return_one(self):
        tokens = tokenize("RETURN 1")
        assert [t.kind for t in tokens] == ["RETURN", "INT", "EOF"]
        assert tokens[1].value == 1

    def test_flagship_query_keyword_histogram(self):
        counts = Counter(t.kind for t in tokenize(NEVERENDING_QUERY))
        assert counts["MATCH"] == 1
        assert counts["WHERE"] == 2
        assert counts["WITH"] == 2
        assert counts["RETURN"] == 1

    def test_unclosed_pattern_lexes_fine(self):
        tokenize("MATCH (i:Issue")  # the parser rejects it, not the lexer
        with pytest.raises(ParseError):
            parse("MATCH (i:Issue")

    def test_offsets(self):
        tokens = tokenize("MATCH (i)")
        assert [t.offset for t in tokens[:3]] == [0, 6, 7]

    def test_stray_character(self):
        with pytest.raises(LexError) as excinfo:
            tokenize("RETURN 1 ; 2")
        assert excinfo.value.offset == 9

    def test_unterminated_string(self):
        with pytest.raises(LexError):
            tokenize('WHERE x = "oops')

    def test_keywords_are_case_sensitive(self):
        assert tokenize("match")[0].kind == "IDENT"


class TestParse:
    def test_minimal_query(self):
        query = parse("MATCH (i:Issue) RETURN i")
        match, ret = query.clauses
        assert isinstance(match, MatchClause)
        assert len(match.patterns) == 1
        assert match.patterns[0].nodes[0].variable == "i"
        assert match.patterns[0].nodes[0].label == "Issue"
        assert isinstance(ret, ReturnClause)
        assert output_columns(query) == ["i"]

    def test_flagship_query_shape(self):
        query = parse(NEVERENDING_QUERY)
        kinds = [type(c).__name__ for c in query.clauses]
        assert kinds == [
            "MatchClause",
            "WhereClause",
            "WithClause",
            "WithClause",
            "WhereClause",
            "ReturnClause",
        ]
        pattern = query.clauses[0].patterns[0]
        assert len(pattern.nodes) == 3
        assert len(pattern.edges) == 2
        assert [e.direction for e in pattern.edges] == ["undirected", "undirected"]
        where = query.clauses[1].expr
        assert len(where.operands) == 3  # three AND-ed predicates
        first_with = query.clauses[2]
        assert isinstance(first_with, WithClause)
        assert first_with.items[1].alias == "Sprints"
        collect = first_with.items[1].expr
        assert isinstance(collect, Call) and collect.func == "collect" and collect.distinct
        final_where = query.clauses[4]
        assert isinstance(final_where, WhereClause)
        assert isinstance(final_where.expr, Cmp) and final_where.expr.op == ">"
        assert output_columns(query) == ["Issues", "InSprints", "Sprints"]
        assert query_placeholders(query) == {"sprint_list", "team", "threshold"}

    def test_must_begin_with_match(self):
        with pytest.raises(ParseError):
            parse("WHERE x = 1 RETURN x")

    def test_unknown_label_rejected(self):
        with pytest.raises(ParseError):
            parse("MATCH (s:Sprint) RETURN s")

    def test_unknown_edge_type_rejected(self):
        with pytest.raises(ParseError):
            parse("MATCH (a)-[:linked]-(b) RETURN a")

    def test_scope_error_carries_variable(self):
        with pytest.raises(ScopeError) as excinfo:
            parse("MATCH (i:Issue) RETURN j")
        assert excinfo.value.variable == "j"

    def test_with_resets_scope(self):
        with pytest.raises(ScopeError):
            parse("MATCH (i:Issue)-[:labels]-(l:Label) WITH i RETURN l")

    def test_with_requires_alias_for_expressions(self):
        with pytest.raises(ParseError):
            parse("MATCH (i:Issue) WITH count(i) RETURN 1")

    def test_aggregate_not_allowed_in_where(self):
        with pytest.raises(ParseError):
            parse("MATCH (i:Issue) WHERE count(i) > 1 RETURN i")

    def test_nested_aggregate_rejected(self):
        with pytest.raises(ParseError):
            parse("MATCH (i:Issue) RETURN count(collect(i)) AS x")

    def test_var_outside_aggregate_in_aggregating_item_rejected(self):
        with pytest.raises(ParseError):
            parse("MATCH (i:Issue) RETURN i.number IN collect(i.number) AS x")

    def test_length_of_collect_is_allowed(self):
        parse("MATCH (i:Issue) WITH length(collect(DISTINCT i)) AS n RETURN n")

    def test_duplicate_columns_rejected(self):
        with pytest.raises(ParseError):
            parse("MATCH (i:Issue) RETURN i AS x, i.number AS x")

    def test_distinct_only_in_collect(self):
        with pytest.raises(ParseError):
            parse("MATCH (i:Issue) RETURN count(DISTINCT i) AS n")

    def test_mixed_direction_edge_rejected(self):
        with pytest.raises(ParseError):
            parse("MATCH (a)<-[:issue]->(b) RETURN a")

    def test_join_via_repeated_variable_across_clauses(self):
        query = parse("MATCH (e:Event)-[:issue]->(i:Issue) MATCH (x:Event)-[:issue]->(i) RETURN i")
        assert len(query.clauses) == 3

    def test_parse_error_reports_offset_and_found(self):
        with pytest.raises(ParseError) as excinfo:
            parse("MATCH (i:Issue) RETURN i,")
        assert excinfo.value.offset == 25


ROUND_TRIP_QUERIES = [
    "MATCH (i:Issue) RETURN i",
    NEVERENDING_QUERY,
    'MATCH (a:Issue)-[:labels]->(b:Label), (c:Event)-[:issue]-(a) WHERE NOT a.state = "open" OR b.name <> "x" RETURN a, b.name AS Name',
    "MATCH (c:Commit)-[:changes]-(f:File) WITH c, count(f) AS n WHERE n > 3 RETURN c AS Commits, n",
    "MATCH (i:Issue) WHERE i.estimate >= 2 AND (i.estimate <= 8 OR i.state = \"open\") RETURN i",
    "MATCH (i:Issue) WHERE i.number IN [1, 2, 3] RETURN i.number, length(i.title) AS Len",
    "MATCH (a)<-[:issue]-(b) RETURN a, b",
    "MATCH (i:Issue) RETURN collect(DISTINCT i.title) AS Titles, avg(i.estimate) AS Avg",
    "MATCH (i:Issue) WHERE {team} = i.title AND i.number IN [{sprint_list}] RETURN i",
    "MATCH (i:Issue) WHERE i.flag = true AND NOT (i.number > 5 AND i.number < 7) RETURN i",
]


@pytest.mark.parametrize("text", ROUND_TRIP_QUERIES)
def test_pretty_print_round_trip(text):
    first = parse(text)
    assert parse(query_text(first)) == first

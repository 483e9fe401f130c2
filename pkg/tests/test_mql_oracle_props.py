"""Random-case equivalence between the evaluator and the brute-force
oracle, plus the generators they share.

The generator emits type-coherent queries (property keys have fixed
value families) over sparse random graphs, so comparisons exercise the
missing-property rule without tripping type errors. Numeric properties
are integers or dyadic floats, keeping aggregate arithmetic exact and
order-independent across the two implementations.
"""

from __future__ import annotations

from random import Random

import pytest

from agilint.graph import GraphStore
from agilint.mql import bind_placeholders, evaluate, parse
from agilint.mql.evaluator import MqlTypeError

from conftest import NEVERENDING_QUERY, build_neverending_store
from mql_oracle import OracleTypeError, canonical_rows, oracle_evaluate

_LABELS = ("Issue", "Event", "Label")
_EDGE_TYPES = ("issue", "labels", "milestone")
# property keys with fixed value families
_INT_KEYS = ("n", "m")
_STR_KEYS = ("s", "t")
_BOOL_KEYS = ("b",)
_STR_VALUES = ("a", "b", "c", "d")
_DYADIC = (0.5, 1.5, 2.0, 2.5)


def random_store(rng: Random) -> GraphStore:
    store = GraphStore()
    node_count = rng.randint(2, 12)
    for _ in range(node_count):
        props = {}
        for key in _INT_KEYS:
            if rng.random() < 0.6:
                props[key] = rng.randint(0, 4)
        for key in _STR_KEYS:
            if rng.random() < 0.5:
                props[key] = rng.choice(_STR_VALUES)
        for key in _BOOL_KEYS:
            if rng.random() < 0.3:
                props[key] = rng.random() < 0.5
        if rng.random() < 0.25:
            props["f"] = rng.choice(_DYADIC)
        store.add_node(rng.choice(_LABELS), props)
    for _ in range(rng.randint(0, 20)):
        store.add_edge(
            rng.randrange(node_count), rng.choice(_EDGE_TYPES), rng.randrange(node_count)
        )
    return store


class QueryGen:
    def __init__(self, rng: Random):
        self.rng = rng
        self.counter = 0

    def fresh_var(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def pattern(self, reuse: list[str]) -> tuple[str, list[str]]:
        rng = self.rng
        length = rng.choice((1, 2, 2, 3))
        variables = []
        parts = []
        for position in range(length):
            anonymous = length > 1 and rng.random() < 0.12
            if anonymous:
                var = None
            elif reuse and rng.random() < 0.3:
                var = rng.choice(reuse)
            else:
                var = self.fresh_var()
            if var is not None:
                variables.append(var)
            label = rng.choice(_LABELS + (None, None))
            name = var or ""
            parts.append(f"({name}:{label})" if label else f"({name})")
            if position < length - 1:
                rel = rng.choice(_EDGE_TYPES + (None,))
                bracket = f"[:{rel}]" if rel else "[]"
                arrow = rng.choice((f"-{bracket}-", f"-{bracket}->", f"<-{bracket}-"))
                parts.append(arrow)
        if not variables:
            # keep at least one name so projections have something to return
            return self.pattern(reuse)
        return "".join(parts), variables

    def predicate(self, variables: list[str]) -> str:
        rng = self.rng
        var = rng.choice(variables)
        kind = rng.random()
        if kind < 0.35:
            key = rng.choice(_INT_KEYS)
            op = rng.choice(("=", "<>", "<", "<=", ">", ">="))
            return f"{var}.{key} {op} {rng.randint(0, 4)}"
        if kind < 0.55:
            key = rng.choice(_STR_KEYS)
            op = rng.choice(("=", "<>"))
            return f'{var}.{key} {op} "{rng.choice(_STR_VALUES)}"'
        if kind < 0.7:
            key = rng.choice(_INT_KEYS)
            values = ", ".join(str(rng.randint(0, 4)) for _ in range(rng.randint(0, 3)))
            return f"{var}.{key} IN [{values}]"
        if kind < 0.8:
            other = rng.choice(variables)
            key = rng.choice(_INT_KEYS)
            return f"{var}.{key} = {other}.{key}"
        if kind < 0.9:
            return f"NOT {var}.{rng.choice(_BOOL_KEYS)} = true"
        return f"{var}.{rng.choice(_STR_KEYS)} = {var}.{rng.choice(_STR_KEYS)}"

    def where(self, variables: list[str]) -> str:
        rng = self.rng
        parts = [self.predicate(variables) for _ in range(rng.randint(1, 3))]
        joiner = " AND " if rng.random() < 0.7 else " OR "
        return "WHERE " + joiner.join(parts)

    def aggregate(self, variables: list[str]) -> str:
        rng = self.rng
        var = rng.choice(variables)
        choice = rng.random()
        if choice < 0.3:
            return f"count({var})"
        if choice < 0.5:
            distinct = "DISTINCT " if rng.random() < 0.5 else ""
            return f"collect({distinct}{var}.{rng.choice(_INT_KEYS)})"
        func = rng.choice(("avg", "sum", "min", "max"))
        key = rng.choice(_INT_KEYS + ("f",))
        return f"{func}({var}.{key})"

    def query(self) -> str:
        rng = self.rng
        lines = []
        text, variables = self.pattern([])
        lines.append(f"MATCH {text}")
        if rng.random() < 0.5:
            lines.append(self.where(variables))
        if rng.random() < 0.4:
            extra_text, extra_vars = self.pattern(variables)
            lines.append(f"MATCH {extra_text}")
            for var in extra_vars:
                if var not in variables:
                    variables.append(var)
            if rng.random() < 0.5:
                lines.append(self.where(variables))
        if rng.random() < 0.5:
            key_var = rng.choice(variables)
            agg = self.aggregate(variables)
            lines.append(f"WITH {key_var}, {agg} AS A")
            if rng.random() < 0.5:
                lines.append(f"WHERE A >= {rng.randint(0, 3)}" if "collect" not in agg else "WHERE length(A) >= 1")
            returns = [key_var, "A"]
            if rng.random() < 0.35:
                # join a fresh pattern against the carried variable
                extra_text, extra_vars = self.pattern([key_var])
                lines.append(f"MATCH {extra_text}")
                joined = next((v for v in extra_vars if v != key_var), None)
                if joined:
                    returns.append(joined)
            elif rng.random() < 0.5:
                returns = [f"{key_var}.{rng.choice(_INT_KEYS)} AS K", "A"]
            lines.append("RETURN " + ", ".join(returns))
        else:
            items = []
            for var in variables[: rng.randint(1, min(3, len(variables)))]:
                if rng.random() < 0.5:
                    items.append(var)
                else:
                    items.append(f"{var}.{rng.choice(_INT_KEYS + _STR_KEYS)} AS c{len(items)}")
            lines.append("RETURN " + ", ".join(items))
        return "\n".join(lines)


def _compare_case(store: GraphStore, text: str) -> str | None:
    """None when both implementations agree; a message otherwise."""
    query = parse(text)
    production_error = oracle_error = None
    production = oracle = None
    try:
        production = evaluate(query, store)
    except MqlTypeError as exc:
        production_error = exc
    try:
        oracle = oracle_evaluate(query, store)
    except OracleTypeError as exc:
        oracle_error = exc
    if (production_error is None) != (oracle_error is None):
        return f"error mismatch: production={production_error!r} oracle={oracle_error!r}"
    if production_error is not None:
        return None
    expected = canonical_rows(oracle[0], oracle[1])
    actual = canonical_rows(production.columns, production.rows)
    if expected != actual:
        return f"row mismatch:\n  oracle   {expected}\n  evaluator {actual}"
    return None


def run_equivalence(cases: int, seed: int = 20250901) -> list[str]:
    rng = Random(seed)
    failures = []
    for case in range(cases):
        store = random_store(rng)
        text = QueryGen(rng).query()
        message = _compare_case(store, text)
        if message is not None:
            failures.append(f"case {case} (query\n{text}\n): {message}")
            if len(failures) >= 3:
                break
    return failures


def test_oracle_matches_on_flagship_query(flagship_bindings):
    store = build_neverending_store()
    bound = bind_placeholders(parse(NEVERENDING_QUERY), flagship_bindings)
    table = evaluate(bound, store)
    columns, rows = oracle_evaluate(bound, store)
    assert canonical_rows(columns, rows) == canonical_rows(table.columns, table.rows)
    assert len(table.rows) == 1


def test_evaluator_equals_oracle_on_200_random_cases():
    failures = run_equivalence(200)
    assert not failures, "\n".join(failures)


@pytest.mark.slow
def test_evaluator_equals_oracle_on_500_random_cases():
    failures = run_equivalence(500, seed=745)
    assert not failures, "\n".join(failures)

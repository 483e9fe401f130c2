"""Pipeline evaluator for bound queries over a graph store.

Semantics:

- MATCH enumerates subgraph matches. Edges are pairwise distinct within
  one MATCH clause; undirected edge atoms match either orientation;
  repeated variables join.
- WHERE filters rows. A comparison touching a missing property is false
  (two-valued logic: NOT of that is true). Ordering comparisons between
  incompatible type families raise ``MqlTypeError``; equality across
  families is simply false.
- WITH projects. When any item contains an aggregate, rows are grouped
  by the non-aggregate items and aggregates run per group. Consecutive
  WITH clauses are independent grouping steps.
- RETURN projects the final table, sorted by rendered values (ties by
  node id), so results are reproducible regardless of enumeration order.
  ``collect()`` output lists are likewise sorted.

Single-variable conjuncts of a WHERE directly following a MATCH are
pushed into candidate enumeration. This never changes the result set,
only the point at which a type error would surface (which side effects
the contract leaves unspecified).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from ..graph import GraphStore, parse_timestamp, render_timestamp
from .binder import UnboundPlaceholder
from .nodes import (
    AGGREGATE_FUNCS,
    BoolOp,
    Call,
    Cmp,
    Lit,
    ListLit,
    MatchClause,
    NotOp,
    Placeholder,
    Prop,
    Query,
    ReturnClause,
    Var,
    WhereClause,
    WithClause,
    contains_aggregate,
    expr_variables,
    walk_expr,
)

_NUMERIC = (int, float)


@dataclass(frozen=True)
class NodeRef:
    """A node-valued cell: identity plus label, resolvable in the store."""

    id: int
    label: str


class MqlTypeError(Exception):
    def __init__(self, message: str, row: dict | None = None):
        context = ""
        if row:
            context = " in row {" + ", ".join(f"{k}={sort_render(v)}" for k, v in sorted(row.items())) + "}"
        super().__init__(message + context)
        self.row = row


@dataclass
class BindingTable:
    columns: list[str]
    rows: list[list]

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def sort_render(value) -> str:
    """Human-readable rendering used in error context."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, _NUMERIC):
        return repr(value)
    if isinstance(value, str):
        return value
    if isinstance(value, datetime):
        return render_timestamp(value)
    if isinstance(value, NodeRef):
        return f"{value.label}#{value.id}"
    if isinstance(value, list):
        return "[" + ", ".join(sort_render(v) for v in value) + "]"
    return repr(value)


def sort_key(value) -> tuple:
    """Total order over cell values: rank by type, then naturally within
    the type (numbers numerically, text lexicographically, nodes by id,
    lists elementwise). Fixes row order and collect() output."""
    if value is None:
        return (0, 0)
    if isinstance(value, bool):
        return (1, int(value))
    if isinstance(value, _NUMERIC):
        return (2, float(value))
    if isinstance(value, str):
        return (3, value)
    if isinstance(value, datetime):
        return (4, render_timestamp(value))
    if isinstance(value, NodeRef):
        return (5, value.label, value.id)
    if isinstance(value, list):
        return (6, tuple(sort_key(v) for v in value))
    raise MqlTypeError(f"unorderable value {value!r}")


def _node_ids(value) -> tuple:
    if isinstance(value, NodeRef):
        return (value.id,)
    if isinstance(value, list):
        return tuple(i for v in value for i in _node_ids(v))
    return ()


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _is_number(value) -> bool:
    return isinstance(value, _NUMERIC) and not isinstance(value, bool)


def _coerce_timestamp_pair(a, b):
    if isinstance(a, datetime) and isinstance(b, str):
        try:
            return a, parse_timestamp(b)
        except ValueError:
            return a, None
    if isinstance(a, str) and isinstance(b, datetime):
        coerced, other = _coerce_timestamp_pair(b, a)
        return other, coerced
    return a, b


def values_equal(a, b) -> bool:
    a, b = _coerce_timestamp_pair(a, b)
    if a is None or b is None:
        return False
    if _is_number(a) and _is_number(b):
        return float(a) == float(b)
    if isinstance(a, bool) and isinstance(b, bool):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if isinstance(a, datetime) and isinstance(b, datetime):
        return a == b
    if isinstance(a, NodeRef) and isinstance(b, NodeRef):
        return a.id == b.id
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    return False


def order_compare(op: str, a, b, row: dict | None = None) -> bool:
    a, b = _coerce_timestamp_pair(a, b)
    comparable = (
        (_is_number(a) and _is_number(b))
        or (isinstance(a, str) and isinstance(b, str))
        or (isinstance(a, datetime) and isinstance(b, datetime))
    )
    if not comparable or a is None or b is None:
        raise MqlTypeError(
            f"cannot order {type(a).__name__} against {type(b).__name__}", row
        )
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def _truth(value, row: dict | None = None) -> bool:
    if value is True or value is False:
        return value
    if value is None:
        return False
    raise MqlTypeError(f"predicate evaluated to non-boolean {value!r}", row)


class _Evaluator:
    def __init__(self, store: GraphStore):
        self.store = store

    # -- scalar expression evaluation -----------------------------------

    def eval_expr(self, expr, row: dict):
        if isinstance(expr, Lit):
            return expr.value
        if isinstance(expr, Var):
            return row.get(expr.name)
        if isinstance(expr, Prop):
            value = row.get(expr.variable)
            if isinstance(value, NodeRef):
                return self.store.node(value.id).properties.get(expr.key)
            return None
        if isinstance(expr, ListLit):
            return [self.eval_expr(e, row) for e in expr.elements]
        if isinstance(expr, Cmp):
            left = self.eval_expr(expr.left, row)
            right = self.eval_expr(expr.right, row)
            return self.apply_cmp(expr.op, left, right, row)
        if isinstance(expr, BoolOp):
            flags = [_truth(self.eval_expr(op, row), row) for op in expr.operands]
            return all(flags) if expr.op == "AND" else any(flags)
        if isinstance(expr, NotOp):
            return not _truth(self.eval_expr(expr.operand, row), row)
        if isinstance(expr, Call):
            if expr.func in AGGREGATE_FUNCS:
                raise MqlTypeError(f"aggregate {expr.func}() outside WITH/RETURN", row)
            return self._length(self.eval_expr(expr.args[0], row), row)
        if isinstance(expr, Placeholder):
            raise UnboundPlaceholder(expr.name)
        raise MqlTypeError(f"cannot evaluate {expr!r}", row)

    def apply_cmp(self, op: str, left, right, row: dict):
        if op == "IN":
            if left is None or right is None:
                return False
            if not isinstance(right, list):
                raise MqlTypeError("IN needs a list on the right-hand side", row)
            return any(values_equal(left, element) for element in right)
        if left is None or right is None:
            return False
        if op == "=":
            return values_equal(left, right)
        if op == "<>":
            return not values_equal(left, right)
        return order_compare(op, left, right, row)

    @staticmethod
    def _length(value, row: dict):
        if value is None:
            return None
        if isinstance(value, (list, str)):
            return len(value)
        raise MqlTypeError(f"length() of {type(value).__name__}", row)

    # -- pattern matching ------------------------------------------------

    def match_clause(self, clause: MatchClause, rows: list[dict], cand_filters: dict) -> list[dict]:
        out: list[dict] = []
        for row in rows:
            self._match_patterns(clause.patterns, 0, row, frozenset(), cand_filters, out)
        return out

    def _match_patterns(self, patterns, index, bindings, used, cand_filters, out):
        if index == len(patterns):
            out.append(bindings)
            return
        for new_bindings, new_used in self._match_path(patterns[index], bindings, used, cand_filters):
            self._match_patterns(patterns, index + 1, new_bindings, new_used, cand_filters, out)

    def _candidate_count(self, node_pattern) -> int:
        if node_pattern.label:
            return len(self.store.nodes_by_label(node_pattern.label))
        return self.store.node_count

    def _node_ok(self, node_pattern, node_id: int, bindings: dict) -> bool:
        if node_pattern.label and self.store.node(node_id).label != node_pattern.label:
            return False
        if node_pattern.variable and node_pattern.variable in bindings:
            bound = bindings[node_pattern.variable]
            return isinstance(bound, NodeRef) and bound.id == node_id
        return True

    def _bind_node(self, node_pattern, node_id: int, bindings: dict, cand_filters):
        """Extend bindings for a fresh variable; None if a pushed filter rejects."""
        if not node_pattern.variable or node_pattern.variable in bindings:
            return bindings
        ref = NodeRef(node_id, self.store.node(node_id).label)
        new_bindings = {**bindings, node_pattern.variable: ref}
        for conjunct in cand_filters.get(node_pattern.variable, ()):
            if not _truth(self.eval_expr(conjunct, new_bindings), new_bindings):
                return None
        return new_bindings

    def _match_path(self, pattern, bindings, used, cand_filters):
        nodes = pattern.nodes
        edges = pattern.edges

        anchor = None
        for idx, np in enumerate(nodes):
            if np.variable and isinstance(bindings.get(np.variable), NodeRef):
                anchor = idx
                break
        if anchor is None:
            anchor = min(range(len(nodes)), key=lambda i: (self._candidate_count(nodes[i]), i))

        # walk outward from the anchor; each later position touches an assigned one
        order: list[tuple[int, int, int]] = []  # (position, edge index, from position)
        for i in range(anchor - 1, -1, -1):
            order.append((i, i, i + 1))
        for i in range(anchor + 1, len(nodes)):
            order.append((i, i - 1, i - 1))

        results: list[tuple[dict, frozenset]] = []

        def walk(step: int, assign: dict, current: dict, used_edges: frozenset):
            if step == len(order):
                results.append((current, used_edges))
                return
            pos, edge_index, from_pos = order[step]
            edge = edges[edge_index]
            going_right = pos > from_pos
            if edge.direction == "undirected":
                direction = "any"
            elif edge.direction == "right":
                direction = "out" if going_right else "in"
            else:
                direction = "in" if going_right else "out"
            seen: set[tuple[int, int]] = set()
            for edge_id, other in self.store.neighbors(assign[from_pos], edge.rel_type, direction):
                if edge_id in used_edges or (edge_id, other) in seen:
                    continue
                seen.add((edge_id, other))
                if not self._node_ok(nodes[pos], other, current):
                    continue
                extended = self._bind_node(nodes[pos], other, current, cand_filters)
                if extended is None:
                    continue
                walk(step + 1, {**assign, pos: other}, extended, used_edges | {edge_id})

        anchor_pattern = nodes[anchor]
        if anchor_pattern.variable and isinstance(bindings.get(anchor_pattern.variable), NodeRef):
            candidates = [bindings[anchor_pattern.variable].id]
        elif anchor_pattern.label:
            candidates = self.store.nodes_by_label(anchor_pattern.label)
        else:
            candidates = list(range(self.store.node_count))

        for node_id in candidates:
            if not self._node_ok(anchor_pattern, node_id, bindings):
                continue
            extended = self._bind_node(anchor_pattern, node_id, bindings, cand_filters)
            if extended is None:
                continue
            walk(0, {anchor: node_id}, extended, used)
        return results

    # -- projection and aggregation ---------------------------------------

    def _aggregate(self, call: Call, group_rows: list[dict]):
        values = [self.eval_expr(call.args[0], row) for row in group_rows]
        values = [v for v in values if v is not None]
        if call.func == "count":
            return len(values)
        if call.func == "collect":
            if call.distinct:
                unique: dict = {}
                for value in values:
                    unique.setdefault(_freeze(value), value)
                values = list(unique.values())
            return sorted(values, key=sort_key)
        numbers = [v for v in values if _is_number(v)]
        if call.func == "sum":
            return sum(numbers) if numbers else 0
        if not numbers:
            return None
        if call.func == "avg":
            return sum(numbers) / len(numbers)
        if call.func == "min":
            return min(numbers)
        return max(numbers)

    def _eval_agg_item(self, expr, group_rows: list[dict]):
        if isinstance(expr, Call) and expr.func in AGGREGATE_FUNCS:
            return self._aggregate(expr, group_rows)
        if isinstance(expr, Lit):
            return expr.value
        if isinstance(expr, ListLit):
            return [self._eval_agg_item(e, group_rows) for e in expr.elements]
        if isinstance(expr, Call):
            return self._length(self._eval_agg_item(expr.args[0], group_rows), None)
        if isinstance(expr, Cmp):
            left = self._eval_agg_item(expr.left, group_rows)
            right = self._eval_agg_item(expr.right, group_rows)
            return self.apply_cmp(expr.op, left, right, None)
        if isinstance(expr, BoolOp):
            flags = [_truth(self._eval_agg_item(op, group_rows)) for op in expr.operands]
            return all(flags) if expr.op == "AND" else any(flags)
        if isinstance(expr, NotOp):
            return not _truth(self._eval_agg_item(expr.operand, group_rows))
        raise MqlTypeError(f"cannot evaluate aggregate item {expr!r}")

    def project(self, items, rows: list[dict]) -> tuple[list[str], list[dict]]:
        from .parser import _item_name

        names = [_item_name(item) for item in items]
        if not any(contains_aggregate(item.expr) for item in items):
            projected = [
                {name: self.eval_expr(item.expr, row) for name, item in zip(names, items)}
                for row in rows
            ]
            return names, projected

        key_pairs = [(n, i) for n, i in zip(names, items) if not contains_aggregate(i.expr)]
        agg_pairs = [(n, i) for n, i in zip(names, items) if contains_aggregate(i.expr)]
        groups: dict[tuple, tuple[dict, list[dict]]] = {}
        for row in rows:
            key_values = {name: self.eval_expr(item.expr, row) for name, item in key_pairs}
            key = tuple(_freeze(key_values[name]) for name, _ in key_pairs)
            groups.setdefault(key, (key_values, []))[1].append(row)
        if not rows and not key_pairs:
            groups[()] = ({}, [])
        projected = []
        for key_values, group_rows in groups.values():
            out = dict(key_values)
            for name, item in agg_pairs:
                out[name] = self._eval_agg_item(item.expr, group_rows)
            projected.append(out)
        return names, projected


def _conjuncts(expr):
    if isinstance(expr, BoolOp) and expr.op == "AND":
        return list(expr.operands)
    return [expr]


def _split_pushdown(expr, scope: set[str], match_clause: MatchClause):
    """Partition a WHERE into (row prefilters, per-new-variable candidate
    filters, residual conjuncts)."""
    new_vars: set[str] = set()
    for pattern in match_clause.patterns:
        for node in pattern.nodes:
            if node.variable and node.variable not in scope:
                new_vars.add(node.variable)
    prefilters, candidate, residual = [], {}, []
    for conjunct in _conjuncts(expr):
        variables = expr_variables(conjunct)
        fresh = variables - scope
        if not fresh:
            prefilters.append(conjunct)
        elif len(fresh) == 1 and next(iter(fresh)) in new_vars:
            candidate.setdefault(next(iter(fresh)), []).append(conjunct)
        else:
            residual.append(conjunct)
    return prefilters, candidate, residual


def evaluate(query: Query, store: GraphStore) -> BindingTable:
    """Evaluate a fully bound query; returns the deterministic table."""
    for clause in query.clauses:
        exprs = []
        if isinstance(clause, WhereClause):
            exprs = [clause.expr]
        elif isinstance(clause, (WithClause, ReturnClause)):
            exprs = [item.expr for item in clause.items]
        for expr in exprs:
            for sub in walk_expr(expr):
                if isinstance(sub, Placeholder):
                    raise UnboundPlaceholder(sub.name)

    ev = _Evaluator(store)
    rows: list[dict] = [{}]
    scope: set[str] = set()
    clauses = list(query.clauses)
    index = 0
    while index < len(clauses):
        clause = clauses[index]
        if isinstance(clause, MatchClause):
            cand_filters: dict = {}
            prefilters: list = []
            residual: list = []
            consumed_where = False
            if index + 1 < len(clauses) and isinstance(clauses[index + 1], WhereClause):
                next_expr = clauses[index + 1].expr
                prefilters, cand_filters, residual = _split_pushdown(next_expr, scope, clause)
                consumed_where = True
            if prefilters:
                rows = [
                    row
                    for row in rows
                    if all(_truth(ev.eval_expr(c, row), row) for c in prefilters)
                ]
            rows = ev.match_clause(clause, rows, cand_filters)
            if residual:
                rows = [
                    row
                    for row in rows
                    if all(_truth(ev.eval_expr(c, row), row) for c in residual)
                ]
            for pattern in clause.patterns:
                for node in pattern.nodes:
                    if node.variable:
                        scope.add(node.variable)
            index += 2 if consumed_where else 1
        elif isinstance(clause, WhereClause):
            rows = [row for row in rows if _truth(ev.eval_expr(clause.expr, row), row)]
            index += 1
        elif isinstance(clause, WithClause):
            names, rows = ev.project(clause.items, rows)
            scope = set(names)
            index += 1
        else:  # ReturnClause
            names, projected = ev.project(clause.items, rows)
            table_rows = [[row[name] for name in names] for row in projected]
            table_rows.sort(
                key=lambda r: (
                    tuple(sort_key(v) for v in r),
                    tuple(i for v in r for i in _node_ids(v)),
                )
            )
            return BindingTable(names, table_rows)
    raise AssertionError("query without RETURN clause")

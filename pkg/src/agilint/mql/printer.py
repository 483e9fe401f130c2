"""Canonical text rendering of query ASTs.

``query_text(parse(q))`` parses back to an AST equal to ``parse(q)``;
the round trip is part of the parser's test contract.
"""

from __future__ import annotations

from datetime import datetime

from ..graph import render_timestamp
from .nodes import (
    BoolOp,
    Call,
    Cmp,
    Item,
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
)


def _lit_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, datetime):
        return f'"{render_timestamp(value)}"'
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, list):
        return "[" + ", ".join(_lit_text(v) for v in value) + "]"
    raise ValueError(f"cannot render literal {value!r}")


def expr_text(expr, parent: str = "") -> str:
    if isinstance(expr, Lit):
        return _lit_text(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Prop):
        return f"{expr.variable}.{expr.key}"
    if isinstance(expr, Placeholder):
        return "{" + expr.name + "}"
    if isinstance(expr, ListLit):
        return "[" + ", ".join(expr_text(e) for e in expr.elements) + "]"
    if isinstance(expr, Call):
        inner = expr_text(expr.args[0])
        if expr.distinct:
            inner = f"DISTINCT {inner}"
        return f"{expr.func}({inner})"
    if isinstance(expr, Cmp):
        def side(operand):
            text = expr_text(operand)
            if isinstance(operand, (Cmp, BoolOp, NotOp)):
                return f"({text})"
            return text

        return f"{side(expr.left)} {expr.op} {side(expr.right)}"
    if isinstance(expr, NotOp):
        inner = expr_text(expr.operand, parent="NOT")
        return f"NOT {inner}"
    if isinstance(expr, BoolOp):
        joined = f" {expr.op} ".join(expr_text(op, parent=expr.op) for op in expr.operands)
        # parenthesize whenever embedded under NOT or a different boolean op
        if parent and parent != expr.op:
            return f"({joined})"
        if parent == expr.op:
            return f"({joined})"
        return joined
    raise ValueError(f"cannot render expression {expr!r}")


def _item_text(item: Item) -> str:
    text = expr_text(item.expr)
    if item.alias:
        text += f" AS {item.alias}"
    return text


def _pattern_text(pattern) -> str:
    parts = []
    for index, node in enumerate(pattern.nodes):
        inner = node.variable or ""
        if node.label:
            inner += f":{node.label}"
        parts.append(f"({inner})")
        if index < len(pattern.edges):
            edge = pattern.edges[index]
            bracket = f"[:{edge.rel_type}]" if edge.rel_type else "[]"
            if edge.direction == "right":
                parts.append(f"-{bracket}->")
            elif edge.direction == "left":
                parts.append(f"<-{bracket}-")
            else:
                parts.append(f"-{bracket}-")
    return "".join(parts)


def query_text(query: Query) -> str:
    lines = []
    for clause in query.clauses:
        if isinstance(clause, MatchClause):
            lines.append("MATCH " + ", ".join(_pattern_text(p) for p in clause.patterns))
        elif isinstance(clause, WhereClause):
            lines.append("WHERE " + expr_text(clause.expr))
        elif isinstance(clause, WithClause):
            lines.append("WITH " + ", ".join(_item_text(i) for i in clause.items))
        elif isinstance(clause, ReturnClause):
            lines.append("RETURN " + ", ".join(_item_text(i) for i in clause.items))
    return "\n".join(lines)

"""Placeholder binding: substitute ``{name}`` holes with literal values.

A placeholder used as the right-hand side of IN must be bound to a list;
inside a list literal, a list-valued binding splices its elements into
the surrounding list (so ``x IN [{sprint_list}]`` sees the list itself,
not a one-element nesting); anywhere else the binding must be a scalar.
Binding a fully bound query is a no-op.
"""

from __future__ import annotations

from datetime import datetime

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
    Query,
    ReturnClause,
    WhereClause,
    WithClause,
)

_SCALAR_TYPES = (str, int, float, bool, datetime)


class UnboundPlaceholder(Exception):
    def __init__(self, name: str):
        super().__init__(f"placeholder {{{name}}} has no binding")
        self.name = name


class PlaceholderTypeMismatch(Exception):
    def __init__(self, name: str, reason: str):
        super().__init__(f"placeholder {{{name}}}: {reason}")
        self.name = name


def _lookup(bindings: dict, name: str):
    if name not in bindings:
        raise UnboundPlaceholder(name)
    return bindings[name]


def _bind_scalar(placeholder: Placeholder, bindings: dict) -> Lit:
    value = _lookup(bindings, placeholder.name)
    if isinstance(value, list):
        raise PlaceholderTypeMismatch(placeholder.name, "bound to a list but used as a scalar")
    if not isinstance(value, _SCALAR_TYPES):
        raise PlaceholderTypeMismatch(placeholder.name, f"unsupported binding type {type(value).__name__}")
    return Lit(value)


def _bind_expr(expr, bindings: dict):
    if isinstance(expr, Placeholder):
        return _bind_scalar(expr, bindings)
    if isinstance(expr, ListLit):
        elements = []
        for element in expr.elements:
            if isinstance(element, Placeholder):
                value = _lookup(bindings, element.name)
                if isinstance(value, list):
                    elements.extend(Lit(v) for v in value)
                else:
                    elements.append(_bind_scalar(element, bindings))
            else:
                elements.append(_bind_expr(element, bindings))
        return ListLit(tuple(elements))
    if isinstance(expr, Cmp):
        if expr.op == "IN" and isinstance(expr.right, Placeholder):
            value = _lookup(bindings, expr.right.name)
            if not isinstance(value, list):
                raise PlaceholderTypeMismatch(expr.right.name, "IN needs a list binding")
            right = Lit(list(value))
        else:
            right = _bind_expr(expr.right, bindings)
        return Cmp(expr.op, _bind_expr(expr.left, bindings), right, expr.offset)
    if isinstance(expr, BoolOp):
        return BoolOp(expr.op, tuple(_bind_expr(op, bindings) for op in expr.operands))
    if isinstance(expr, NotOp):
        return NotOp(_bind_expr(expr.operand, bindings))
    if isinstance(expr, Call):
        return Call(expr.func, tuple(_bind_expr(a, bindings) for a in expr.args), expr.distinct, expr.offset)
    return expr


def bind_placeholders(query: Query, bindings: dict) -> Query:
    """Return a copy of ``query`` with every placeholder replaced by its
    bound value. Extra bindings are ignored; missing ones raise."""
    clauses = []
    for clause in query.clauses:
        if isinstance(clause, MatchClause):
            clauses.append(clause)
        elif isinstance(clause, WhereClause):
            clauses.append(WhereClause(_bind_expr(clause.expr, bindings)))
        elif isinstance(clause, WithClause):
            clauses.append(
                WithClause(tuple(Item(_bind_expr(i.expr, bindings), i.alias, i.offset) for i in clause.items))
            )
        elif isinstance(clause, ReturnClause):
            clauses.append(
                ReturnClause(tuple(Item(_bind_expr(i.expr, bindings), i.alias, i.offset) for i in clause.items))
            )
    return Query(tuple(clauses))

"""AST node types for the metric query language."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

AGGREGATE_FUNCS = ("collect", "count", "avg", "sum", "min", "max")
SCALAR_FUNCS = ("length",)


@dataclass(frozen=True)
class Lit:
    value: object


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Prop:
    variable: str
    key: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Placeholder:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ListLit:
    elements: tuple = ()


@dataclass(frozen=True)
class Cmp:
    op: str  # = <> < <= > >= IN
    left: "Expr"
    right: "Expr"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BoolOp:
    op: str  # AND | OR
    operands: tuple = ()


@dataclass(frozen=True)
class NotOp:
    operand: "Expr" = None


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple = ()
    distinct: bool = False
    offset: int = field(default=0, compare=False)


Expr = Union[Lit, Var, Prop, Placeholder, ListLit, Cmp, BoolOp, NotOp, Call]


@dataclass(frozen=True)
class NodePattern:
    variable: str | None
    label: str | None
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class EdgePattern:
    rel_type: str | None
    direction: str  # left | right | undirected


@dataclass(frozen=True)
class PathPattern:
    nodes: tuple  # NodePattern, k+1 entries
    edges: tuple  # EdgePattern, k entries


@dataclass(frozen=True)
class Item:
    expr: Expr
    alias: str | None
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MatchClause:
    patterns: tuple  # PathPattern


@dataclass(frozen=True)
class WhereClause:
    expr: Expr = None


@dataclass(frozen=True)
class WithClause:
    items: tuple = ()


@dataclass(frozen=True)
class ReturnClause:
    items: tuple = ()


@dataclass(frozen=True)
class Query:
    clauses: tuple  # MatchClause | WhereClause | WithClause, then ReturnClause last


def walk_expr(expr: Expr):
    """Yield ``expr`` and every sub-expression, depth first."""
    yield expr
    if isinstance(expr, Cmp):
        yield from walk_expr(expr.left)
        yield from walk_expr(expr.right)
    elif isinstance(expr, BoolOp):
        for operand in expr.operands:
            yield from walk_expr(operand)
    elif isinstance(expr, NotOp):
        yield from walk_expr(expr.operand)
    elif isinstance(expr, Call):
        for arg in expr.args:
            yield from walk_expr(arg)
    elif isinstance(expr, ListLit):
        for element in expr.elements:
            yield from walk_expr(element)


def expr_variables(expr: Expr) -> set[str]:
    """Names of variables referenced anywhere in ``expr``."""
    names: set[str] = set()
    for sub in walk_expr(expr):
        if isinstance(sub, Var):
            names.add(sub.name)
        elif isinstance(sub, Prop):
            names.add(sub.variable)
    return names


def contains_aggregate(expr: Expr) -> bool:
    return any(isinstance(sub, Call) and sub.func in AGGREGATE_FUNCS for sub in walk_expr(expr))


def query_placeholders(query: Query) -> set[str]:
    """Placeholder names appearing anywhere in the query."""
    names: set[str] = set()
    for clause in query.clauses:
        exprs: list[Expr] = []
        if isinstance(clause, WhereClause):
            exprs.append(clause.expr)
        elif isinstance(clause, (WithClause, ReturnClause)):
            exprs.extend(item.expr for item in clause.items)
        for expr in exprs:
            for sub in walk_expr(expr):
                if isinstance(sub, Placeholder):
                    names.add(sub.name)
    return names

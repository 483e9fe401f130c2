"""Rating expressions and score aggregation.

A rating expression maps violation statistics to a 0-100 score. The
concrete syntax is plain arithmetic over named bindings — the ``#``
sigil some rating formulas are written with elsewhere is not part of
the grammar (``violations``, not ``#violations``):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := number | ident | func "(" expr ("," expr)* ")"
            | "(" expr ")" | "-" factor

Functions: max, min, pow (two arguments); exp, abs (one argument).

Evaluation is IEEE float arithmetic with a final clamp to [0, 100].
Division by zero or any non-finite intermediate raises
``DegenerateInput``, which marks the metric "not applicable" — absence
of data is neither conformance nor violation, so such results are
excluded from aggregation instead of scoring 0 or 100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mql import BindingTable

FUNCTION_ARITY = {"max": 2, "min": 2, "pow": 2, "exp": 1, "abs": 1}

DEFAULT_SEVERITY_WEIGHTS = {"Low": 1.0, "Medium": 2.0, "High": 3.0}
SEVERITY_LEVELS = ("Low", "Medium", "High")


class RatingError(Exception):
    """Base class for rating parse/eval errors."""


class ParseError(RatingError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownFunction(RatingError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown function {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class ArityError(RatingError):
    def __init__(self, name: str, expected: int, got: int, offset: int):
        super().__init__(f"{name}() takes {expected} arguments, got {got} at offset {offset}")
        self.offset = offset


class UnknownBinding(RatingError):
    def __init__(self, name: str):
        super().__init__(f"no binding named {name!r}")
        self.name = name


class DegenerateInput(RatingError):
    """The formula hit a division by zero or a non-finite value; the
    metric is not applicable to this input."""


class AliasTargetMissing(RatingError):
    def __init__(self, alias: str, target: str):
        super().__init__(f"alias {alias!r} points at missing binding {target!r}")
        self.alias = alias
        self.target = target


class NothingToAggregate(RatingError):
    pass


# -- expression AST ----------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple


RatingExpr = object


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch


def parse_rating(text: str) -> RatingExpr:
    """Parse rating text; rejects unknown functions and wrong arities."""
    scanner = _Scanner(text)
    expr = _parse_expr(scanner)
    scanner.skip_ws()
    if scanner.pos != len(text):
        raise ParseError(f"unexpected {text[scanner.pos]!r}", scanner.pos)
    return expr


def _parse_expr(s: _Scanner):
    node = _parse_term(s)
    while s.peek() in ("+", "-"):
        op = s.take()
        node = BinOp(op, node, _parse_term(s))
    return node


def _parse_term(s: _Scanner):
    node = _parse_factor(s)
    while s.peek() in ("*", "/"):
        op = s.take()
        node = BinOp(op, node, _parse_factor(s))
    return node


def _parse_factor(s: _Scanner):
    ch = s.peek()
    if ch == "-":
        s.take()
        return Neg(_parse_factor(s))
    if ch == "(":
        s.take()
        node = _parse_expr(s)
        if s.peek() != ")":
            raise ParseError("expected )", s.pos)
        s.take()
        return node
    if ch.isdigit() or ch == ".":
        start = s.pos
        while s.pos < len(s.text) and (s.text[s.pos].isdigit() or s.text[s.pos] == "."):
            s.pos += 1
        literal = s.text[start : s.pos]
        try:
            return Num(float(literal))
        except ValueError:
            raise ParseError(f"bad number {literal!r}", start) from None
    if ch.isalpha() or ch == "_":
        start = s.pos
        while s.pos < len(s.text) and (s.text[s.pos].isalnum() or s.text[s.pos] == "_"):
            s.pos += 1
        name = s.text[start : s.pos]
        if s.peek() == "(":
            s.take()
            args = [_parse_expr(s)]
            while s.peek() == ",":
                s.take()
                args.append(_parse_expr(s))
            if s.peek() != ")":
                raise ParseError("expected )", s.pos)
            s.take()
            if name not in FUNCTION_ARITY:
                raise UnknownFunction(name, start)
            if len(args) != FUNCTION_ARITY[name]:
                raise ArityError(name, FUNCTION_ARITY[name], len(args), start)
            return Func(name, tuple(args))
        return Name(name)
    raise ParseError(f"expected a factor, found {ch!r}" if ch else "unexpected end of expression", s.pos)


def rating_bindings(expr: RatingExpr) -> set[str]:
    """Names referenced by the expression."""
    names: set[str] = set()

    def walk(node):
        if isinstance(node, Name):
            names.add(node.name)
        elif isinstance(node, BinOp):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Neg):
            walk(node.operand)
        elif isinstance(node, Func):
            for arg in node.args:
                walk(arg)

    walk(expr)
    return names


def eval_rating(expr: RatingExpr, bindings: dict[str, float]) -> float:
    """Evaluate to a score clamped into [0, 100]."""

    def check(value: float) -> float:
        if not math.isfinite(value):
            raise DegenerateInput("non-finite intermediate value")
        return value

    def ev(node) -> float:
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Name):
            if node.name not in bindings:
                raise UnknownBinding(node.name)
            return check(float(bindings[node.name]))
        if isinstance(node, Neg):
            return -ev(node.operand)
        if isinstance(node, BinOp):
            left = ev(node.left)
            right = ev(node.right)
            if node.op == "+":
                return check(left + right)
            if node.op == "-":
                return check(left - right)
            if node.op == "*":
                return check(left * right)
            if right == 0.0:
                raise DegenerateInput("division by zero")
            return check(left / right)
        if isinstance(node, Func):
            args = [ev(arg) for arg in node.args]
            if node.name == "max":
                return max(args)
            if node.name == "min":
                return min(args)
            if node.name == "pow":
                try:
                    return check(math.pow(args[0], args[1]))
                except (OverflowError, ValueError):
                    raise DegenerateInput("pow out of range") from None
            if node.name == "exp":
                try:
                    return check(math.exp(args[0]))
                except OverflowError:
                    raise DegenerateInput("exp overflow") from None
            return abs(args[0])
        raise RatingError(f"cannot evaluate {node!r}")

    value = ev(expr)
    return min(100.0, max(0.0, value))


# -- bindings from query results ---------------------------------------------


def _numeric(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def standard_bindings(
    table: BindingTable,
    context_scalars: dict[str, float] | None = None,
    params: dict[str, float] | None = None,
    aliases: dict[str, str] | None = None,
) -> dict[str, float]:
    """Build the name->number map a rating expression evaluates against.

    Always contains ``violations`` (the row count). Each column whose
    values are numeric contributes ``avg_<col>``, ``sum_<col>``,
    ``max_<col>``, ``min_<col>``. Params and context scalars come in by
    name, then declared aliases are applied. An alias whose target
    aggregate is missing resolves to 0.0 on an empty table (so
    zero-violation inputs still rate) and raises otherwise.
    """
    bindings: dict[str, float] = {"violations": float(len(table.rows))}
    for name, value in (context_scalars or {}).items():
        bindings[name] = float(value)
    for name, value in (params or {}).items():
        bindings[name] = float(value)
    for index, column in enumerate(table.columns):
        values = [row[index] for row in table.rows if _numeric(row[index])]
        if not values or len(values) != len(table.rows):
            continue
        bindings[f"avg_{column}"] = sum(values) / len(values)
        bindings[f"sum_{column}"] = float(sum(values))
        bindings[f"max_{column}"] = float(max(values))
        bindings[f"min_{column}"] = float(min(values))
    for alias, target in (aliases or {}).items():
        if target in bindings:
            bindings[alias] = bindings[target]
        elif not table.rows:
            bindings[alias] = 0.0
        else:
            raise AliasTargetMissing(alias, target)
    return bindings


def aggregate_scores(entries: list[tuple[float, float]]) -> float:
    """Severity-weighted arithmetic mean of ``(score, weight)`` pairs.

    Callers drop inapplicable results before calling; an empty list
    raises ``NothingToAggregate``. Weights must be positive.
    """
    if not entries:
        raise NothingToAggregate("every metric was inapplicable")
    for _, weight in entries:
        if weight <= 0:
            raise ValueError(f"severity weight must be positive, got {weight}")
    total_weight = sum(weight for _, weight in entries)
    return sum(score * weight for score, weight in entries) / total_weight


def severity_weight(level: str, weights: dict[str, float] | None = None) -> float:
    table = weights or DEFAULT_SEVERITY_WEIGHTS
    if level not in table:
        raise ValueError(f"unknown severity level {level!r}")
    return float(table[level])

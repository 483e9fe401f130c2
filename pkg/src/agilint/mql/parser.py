"""Recursive-descent parser for the metric query language.

Grammar:

    query  := match (match | where | with)* return
    match  := "MATCH" pattern ("," pattern)*
    pattern:= node (edge node)*
    node   := "(" [ident] [":" ident] ")"
    edge   := ("-" | "<-") "[" [":" ident] "]" ("-" | "->")
    where  := "WHERE" or_expr
    with   := "WITH" item ("," item)*
    return := "RETURN" item ("," item)*
    item   := expr ["AS" ident]

Parsing also validates: pattern labels and edge types against the store
schema, variable scope (MATCH introduces, WITH resets), aggregate
placement (WITH/RETURN items only, never nested), and column-name
uniqueness. Placeholders (``{name}``) are recorded but stay unresolved.
"""

from __future__ import annotations

from ..graph import EDGE_TYPES, NODE_LABELS
from .lexer import Token, tokenize
from .nodes import (
    AGGREGATE_FUNCS,
    SCALAR_FUNCS,
    BoolOp,
    Call,
    Cmp,
    EdgePattern,
    Item,
    Lit,
    ListLit,
    MatchClause,
    NodePattern,
    NotOp,
    PathPattern,
    Placeholder,
    Prop,
    Query,
    ReturnClause,
    Var,
    WhereClause,
    WithClause,
    contains_aggregate,
    walk_expr,
)

_CMP_OPS = {"EQ": "=", "NE": "<>", "LT": "<", "LE": "<=", "GT": ">", "GE": ">="}
_FUNCS = AGGREGATE_FUNCS + SCALAR_FUNCS


class ParseError(Exception):
    def __init__(self, offset: int, expected: str, found: str):
        super().__init__(f"expected {expected}, found {found} at offset {offset}")
        self.offset = offset
        self.expected = expected
        self.found = found


class ScopeError(Exception):
    def __init__(self, variable: str, offset: int):
        super().__init__(f"variable {variable!r} not in scope at offset {offset}")
        self.variable = variable
        self.offset = offset


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "EOF":
            self.pos += 1
        return token

    def expect(self, kind: str, expected: str | None = None) -> Token:
        token = self.peek()
        if token.kind != kind:
            raise ParseError(token.offset, expected or kind, token.text or "end of input")
        return self.advance()

    def fail(self, expected: str) -> ParseError:
        token = self.peek()
        return ParseError(token.offset, expected, token.text or "end of input")

    # -- clauses -------------------------------------------------------

    def parse_query(self) -> Query:
        if self.peek().kind != "MATCH":
            raise self.fail("MATCH")
        clauses = [self.parse_match()]
        while self.peek().kind in ("MATCH", "WHERE", "WITH"):
            kind = self.peek().kind
            if kind == "MATCH":
                clauses.append(self.parse_match())
            elif kind == "WHERE":
                clauses.append(self.parse_where())
            else:
                clauses.append(self.parse_with())
        if self.peek().kind != "RETURN":
            raise self.fail("RETURN")
        clauses.append(self.parse_return())
        self.expect("EOF", "end of query")
        return Query(tuple(clauses))

    def parse_match(self) -> MatchClause:
        self.expect("MATCH")
        patterns = [self.parse_pattern()]
        while self.peek().kind == "COMMA":
            self.advance()
            patterns.append(self.parse_pattern())
        return MatchClause(tuple(patterns))

    def parse_pattern(self) -> PathPattern:
        nodes = [self.parse_node_pattern()]
        edges = []
        while self.peek().kind in ("DASH", "ARROW_LEFT"):
            edges.append(self.parse_edge_pattern())
            nodes.append(self.parse_node_pattern())
        return PathPattern(tuple(nodes), tuple(edges))

    def parse_node_pattern(self) -> NodePattern:
        opening = self.expect("LPAREN", "( of node pattern")
        variable = None
        label = None
        if self.peek().kind == "IDENT":
            variable = self.advance().text
        if self.peek().kind == "COLON":
            self.advance()
            label_token = self.expect("IDENT", "node label")
            if label_token.text not in NODE_LABELS:
                raise ParseError(label_token.offset, "a schema node label", label_token.text)
            label = label_token.text
        self.expect("RPAREN", ") of node pattern")
        return NodePattern(variable, label, opening.offset)

    def parse_edge_pattern(self) -> EdgePattern:
        opener = self.advance()  # DASH or ARROW_LEFT
        self.expect("LBRACKET", "[ of edge pattern")
        rel_type = None
        if self.peek().kind == "COLON":
            self.advance()
            type_token = self.expect("IDENT", "edge type")
            if type_token.text not in EDGE_TYPES:
                raise ParseError(type_token.offset, "a schema edge type", type_token.text)
            rel_type = type_token.text
        self.expect("RBRACKET", "] of edge pattern")
        closer = self.peek()
        if closer.kind == "DASH":
            self.advance()
            direction = "left" if opener.kind == "ARROW_LEFT" else "undirected"
        elif closer.kind == "ARROW_RIGHT":
            if opener.kind == "ARROW_LEFT":
                raise ParseError(closer.offset, "- after <-[…]", closer.text)
            self.advance()
            direction = "right"
        else:
            raise self.fail("- or -> after edge brackets")
        return EdgePattern(rel_type, direction)

    def parse_where(self) -> WhereClause:
        self.expect("WHERE")
        return WhereClause(self.parse_or())

    def parse_with(self) -> WithClause:
        self.expect("WITH")
        return WithClause(self.parse_items())

    def parse_return(self) -> ReturnClause:
        self.expect("RETURN")
        return ReturnClause(self.parse_items())

    def parse_items(self) -> tuple:
        items = [self.parse_item()]
        while self.peek().kind == "COMMA":
            self.advance()
            items.append(self.parse_item())
        return tuple(items)

    def parse_item(self) -> Item:
        offset = self.peek().offset
        expr = self.parse_or()
        alias = None
        if self.peek().kind == "AS":
            self.advance()
            alias = self.expect("IDENT", "alias name").text
        return Item(expr, alias, offset)

    # -- expressions ---------------------------------------------------

    def parse_or(self):
        operands = [self.parse_and()]
        while self.peek().kind == "OR":
            self.advance()
            operands.append(self.parse_and())
        if len(operands) == 1:
            return operands[0]
        return BoolOp("OR", tuple(operands))

    def parse_and(self):
        operands = [self.parse_not()]
        while self.peek().kind == "AND":
            self.advance()
            operands.append(self.parse_not())
        if len(operands) == 1:
            return operands[0]
        return BoolOp("AND", tuple(operands))

    def parse_not(self):
        if self.peek().kind == "NOT":
            self.advance()
            return NotOp(self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self):
        left = self.parse_primary()
        token = self.peek()
        if token.kind in _CMP_OPS:
            self.advance()
            right = self.parse_primary()
            return Cmp(_CMP_OPS[token.kind], left, right, token.offset)
        if token.kind == "IN":
            self.advance()
            right = self.parse_primary()
            return Cmp("IN", left, right, token.offset)
        return left

    def parse_primary(self):
        token = self.peek()
        if token.kind == "INT" or token.kind == "FLOAT":
            self.advance()
            return Lit(token.value)
        if token.kind == "DASH":
            number = self.peek(1)
            if number.kind in ("INT", "FLOAT"):
                self.advance()
                self.advance()
                return Lit(-number.value)
            raise self.fail("a number after -")
        if token.kind == "STRING":
            self.advance()
            return Lit(token.value)
        if token.kind == "LBRACE":
            self.advance()
            name = self.expect("IDENT", "placeholder name").text
            self.expect("RBRACE", "} of placeholder")
            return Placeholder(name, token.offset)
        if token.kind == "LBRACKET":
            self.advance()
            elements = []
            if self.peek().kind != "RBRACKET":
                elements.append(self.parse_or())
                while self.peek().kind == "COMMA":
                    self.advance()
                    elements.append(self.parse_or())
            self.expect("RBRACKET", "] of list")
            return ListLit(tuple(elements))
        if token.kind == "LPAREN":
            self.advance()
            inner = self.parse_or()
            self.expect("RPAREN", ") of group")
            return inner
        if token.kind == "IDENT":
            if token.text == "true":
                self.advance()
                return Lit(True)
            if token.text == "false":
                self.advance()
                return Lit(False)
            if self.peek(1).kind == "LPAREN":
                return self.parse_call()
            self.advance()
            if self.peek().kind == "DOT":
                self.advance()
                key = self.expect("IDENT", "property name").text
                return Prop(token.text, key, token.offset)
            return Var(token.text, token.offset)
        raise self.fail("an expression")

    def parse_call(self):
        name_token = self.advance()
        if name_token.text not in _FUNCS:
            raise ParseError(name_token.offset, "a known function", name_token.text)
        self.expect("LPAREN")
        distinct = False
        if self.peek().kind == "DISTINCT":
            if name_token.text != "collect":
                raise ParseError(self.peek().offset, "DISTINCT only inside collect()", "DISTINCT")
            self.advance()
            distinct = True
        args = [self.parse_or()]
        while self.peek().kind == "COMMA":
            self.advance()
            args.append(self.parse_or())
        self.expect("RPAREN", ") of call")
        if len(args) != 1:
            raise ParseError(name_token.offset, f"{name_token.text}() takes one argument", f"{len(args)} arguments")
        return Call(name_token.text, tuple(args), distinct, name_token.offset)


def _expr_var_offsets(expr):
    for sub in walk_expr(expr):
        if isinstance(sub, Var):
            yield sub.name, sub.offset
        elif isinstance(sub, Prop):
            yield sub.variable, sub.offset


def _check_aggregate_item(item: Item) -> None:
    """In an item containing an aggregate, every variable reference must
    sit inside the aggregate call, and aggregates must not nest."""
    for sub in walk_expr(item.expr):
        if isinstance(sub, Call) and sub.func in AGGREGATE_FUNCS:
            for inner in walk_expr(sub.args[0]):
                if isinstance(inner, Call) and inner.func in AGGREGATE_FUNCS:
                    raise ParseError(inner.offset, "no aggregate inside an aggregate", inner.func)

    def outside_refs(expr):
        if isinstance(expr, Call) and expr.func in AGGREGATE_FUNCS:
            return
        if isinstance(expr, (Var, Prop)):
            name = expr.name if isinstance(expr, Var) else expr.variable
            raise ParseError(
                expr.offset,
                "variable references inside the aggregate call of an aggregating item",
                name,
            )
        if isinstance(expr, Cmp):
            outside_refs(expr.left)
            outside_refs(expr.right)
        elif isinstance(expr, BoolOp):
            for operand in expr.operands:
                outside_refs(operand)
        elif isinstance(expr, NotOp):
            outside_refs(expr.operand)
        elif isinstance(expr, Call):
            for arg in expr.args:
                outside_refs(arg)
        elif isinstance(expr, ListLit):
            for element in expr.elements:
                outside_refs(element)

    outside_refs(item.expr)


def _item_name(item: Item) -> str:
    if item.alias:
        return item.alias
    if isinstance(item.expr, Var):
        return item.expr.name
    from .printer import expr_text

    return expr_text(item.expr)


def _validate(query: Query) -> None:
    scope: set[str] = set()
    for clause in query.clauses:
        if isinstance(clause, MatchClause):
            for pattern in clause.patterns:
                for node in pattern.nodes:
                    if node.variable is not None:
                        scope.add(node.variable)
        elif isinstance(clause, WhereClause):
            if contains_aggregate(clause.expr):
                raise ParseError(0, "no aggregate in WHERE", "aggregate")
            for name, offset in _expr_var_offsets(clause.expr):
                if name not in scope:
                    raise ScopeError(name, offset)
        elif isinstance(clause, (WithClause, ReturnClause)):
            names: list[str] = []
            for item in clause.items:
                for name, offset in _expr_var_offsets(item.expr):
                    if name not in scope:
                        raise ScopeError(name, offset)
                if contains_aggregate(item.expr):
                    _check_aggregate_item(item)
                if isinstance(clause, WithClause) and item.alias is None and not isinstance(item.expr, Var):
                    raise ParseError(item.offset, "AS name for a non-variable WITH item", "expression")
                names.append(_item_name(item))
            duplicates = {n for n in names if names.count(n) > 1}
            if duplicates:
                raise ParseError(clause.items[0].offset, "unique column names", sorted(duplicates)[0])
            if isinstance(clause, WithClause):
                scope = set(names)


def parse(text: str) -> Query:
    """Parse query text into a validated AST."""
    query = _Parser(tokenize(text)).parse_query()
    _validate(query)
    return query


def output_columns(query: Query) -> list[str]:
    """Column names the query's RETURN clause will produce."""
    return [_item_name(item) for item in query.clauses[-1].items]

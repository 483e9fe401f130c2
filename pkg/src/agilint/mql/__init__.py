"""Metric query language: lexer, parser, placeholder binding, evaluator."""

from .binder import PlaceholderTypeMismatch, UnboundPlaceholder, bind_placeholders
from .evaluator import BindingTable, MqlTypeError, NodeRef, evaluate, sort_key, sort_render
from .lexer import LexError, Token, tokenize
from .nodes import AGGREGATE_FUNCS, Query, query_placeholders
from .parser import ParseError, ScopeError, output_columns, parse
from .printer import query_text

__all__ = [
    "AGGREGATE_FUNCS",
    "BindingTable",
    "LexError",
    "MqlTypeError",
    "NodeRef",
    "ParseError",
    "PlaceholderTypeMismatch",
    "Query",
    "ScopeError",
    "Token",
    "UnboundPlaceholder",
    "bind_placeholders",
    "evaluate",
    "output_columns",
    "parse",
    "query_placeholders",
    "query_text",
    "sort_key",
    "sort_render",
    "tokenize",
]

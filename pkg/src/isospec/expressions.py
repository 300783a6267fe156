"""Small expression language for coefficients given on the command line.

Accepted grammar: decimal numbers, the variable x, the operators
+ - * / ^ (also **), parentheses, and the functions exp, sin, cos, log.
Anything else is rejected.  Parsing and differentiation are delegated to
sympy; evaluation is a vectorised numpy callable.
"""
from __future__ import annotations

import io
import token as _tok
import tokenize
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from .errors import MalformedExpression

X = sp.Symbol("x")
_FUNCS = {"exp": sp.exp, "sin": sp.sin, "cos": sp.cos, "log": sp.log}
_LOCALS = {"x": X, **_FUNCS}
_TRANSFORMS = standard_transformations + (convert_xor,)
_NAMES = set(_LOCALS)
_OPS = {"+", "-", "*", "/", "**", "^", "(", ")"}
_SKIP = {_tok.ENCODING, _tok.NEWLINE, _tok.NL, _tok.ENDMARKER}


def _lex_check(text: str) -> None:
    # reject anything outside the grammar before sympy ever evaluates it
    try:
        toks = list(tokenize.tokenize(io.BytesIO(text.encode()).readline))
    except tokenize.TokenizeError as exc:
        raise MalformedExpression(text, str(exc)) from None
    for t in toks:
        if t.type in _SKIP:
            continue
        if t.type == _tok.NUMBER:
            continue
        if t.type == _tok.NAME:
            if t.string in _NAMES:
                continue
            raise MalformedExpression(text, f"unknown name: {t.string}")
        if t.type == _tok.OP and t.string in _OPS:
            continue
        raise MalformedExpression(text, f"disallowed token: {t.string!r}")


def _vectorized(expr) -> Callable[[np.ndarray], np.ndarray]:
    raw = sp.lambdify(X, expr, modules="numpy")

    def fn(x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(raw(x), dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape).copy()
        return out if x.ndim else float(out)

    return fn


@dataclass(frozen=True)
class CompiledExpr:
    """A parsed expression together with its numpy evaluator."""

    text: str
    expr: sp.Expr
    fn: Callable = field(compare=False, repr=False, default=None)

    def __call__(self, x):
        return self.fn(x)

    def diff(self, order: int = 1) -> "CompiledExpr":
        d = sp.diff(self.expr, X, order)
        return CompiledExpr(text=str(d), expr=d, fn=_vectorized(d))


def compile_expression(text: str) -> CompiledExpr:
    """Parse text in the restricted grammar and return an evaluator.

    Raises MalformedExpression on syntax errors, unknown names, or unknown
    functions.
    """
    if not isinstance(text, str) or not text.strip():
        raise MalformedExpression(text, "empty expression")
    _lex_check(text)
    try:
        expr = parse_expr(
            text, local_dict=_LOCALS, transformations=_TRANSFORMS, evaluate=True
        )
    except Exception as exc:  # sympy raises several token/syntax types
        raise MalformedExpression(text, str(exc)) from None
    if not isinstance(expr, sp.Basic):
        raise MalformedExpression(text, "not a scalar expression")
    stray = expr.free_symbols - {X}
    if stray:
        names = ", ".join(sorted(str(s) for s in stray))
        raise MalformedExpression(text, f"unknown name(s): {names}")
    if expr.has(sp.I):
        raise MalformedExpression(text, "complex-valued expression")
    return CompiledExpr(text=text, expr=expr, fn=_vectorized(expr))


def constant(value: float) -> CompiledExpr:
    expr = sp.Float(value) if value != int(value) else sp.Integer(int(value))
    return CompiledExpr(text=str(value), expr=expr, fn=_vectorized(expr))

"""Tiny closed-form expression language for jump entries.

Problem files carry jump matrices as strings so that the same formula can
be re-evaluated at reflected points 1/conj(z) when checking inversion
symmetry.  The grammar, in EBNF:

    expr   = term , { ( "+" | "-" ) , term } ;
    term   = unary , { ( "*" | "/" ) , unary } ;
    unary  = { "+" | "-" } , power ;
    power  = atom , [ ( "^" | "**" ) , unary ] ;
    atom   = NUMBER | "i" | "pi" | "e" | "z"
           | name , "(" , expr , ")"
           | "(" , expr , ")" ;
    NUMBER = ( digits [ "." digits ] | "." digits )
             [ ( "e" | "E" ) [ "+" | "-" ] digits ] [ "i" ] ;

"^" and "**" are synonyms and associate to the right; a trailing "i"
makes a literal imaginary.  Built-in functions are exp and conj; callers
may register extra single-argument names (the reflection coefficient r,
for instance).  Evaluation is plain complex arithmetic and any division
by zero or non-finite value raises EvalError.
"""

from __future__ import annotations

import cmath
import math
import re
from typing import Callable, Mapping

from .errors import EvalError, ParseError

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")

_CONSTANTS = {
    "i": 1j,
    "pi": complex(math.pi),
    "e": complex(math.e),
}

_BUILTIN_FUNCTIONS: dict[str, Callable] = {
    "exp": cmath.exp,
    "conj": lambda w: complex(w).conjugate(),
}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _NUMBER_RE.match(text, pos)
        if m is not None:
            tokens.append(("number", m.group(), pos))
            pos = m.end()
            continue
        m = _NAME_RE.match(text, pos)
        if m is not None:
            tokens.append(("name", m.group(), pos))
            pos = m.end()
            continue
        if text.startswith("**", pos):
            tokens.append(("op", "**", pos))
            pos += 2
            continue
        if ch in "+-*/^()":
            tokens.append(("op", ch, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(("end", "", len(text)))
    return tokens


def _parse_number(text: str) -> complex:
    if text.endswith("i"):
        return complex(0.0, float(text[:-1]))
    return complex(float(text))


class _Parser:
    """Recursive descent over the token list; nodes are closures in z."""

    def __init__(self, tokens: list, functions: Mapping[str, Callable]):
        self.tokens = tokens
        self.index = 0
        self.functions = functions

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept_op(self, *ops: str) -> str | None:
        kind, value, _ = self.peek()
        if kind == "op" and value in ops:
            self.advance()
            return value
        return None

    def parse(self) -> Callable:
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing token {value!r}", pos)
        return node

    def expr(self) -> Callable:
        node = self.term()
        while True:
            op = self.accept_op("+", "-")
            if op is None:
                return node
            right = self.term()
            if op == "+":
                node = (lambda a, b: lambda z: a(z) + b(z))(node, right)
            else:
                node = (lambda a, b: lambda z: a(z) - b(z))(node, right)

    def term(self) -> Callable:
        node = self.unary()
        while True:
            op = self.accept_op("*", "/")
            if op is None:
                return node
            right = self.unary()
            if op == "*":
                node = (lambda a, b: lambda z: a(z) * b(z))(node, right)
            else:
                node = (lambda a, b: lambda z: a(z) / b(z))(node, right)

    def unary(self) -> Callable:
        negate = False
        while True:
            op = self.accept_op("+", "-")
            if op is None:
                break
            if op == "-":
                negate = not negate
        node = self.power()
        if negate:
            return (lambda a: lambda z: -a(z))(node)
        return node

    def power(self) -> Callable:
        base = self.atom()
        if self.accept_op("^", "**") is None:
            return base
        exponent = self.unary()
        return (lambda a, b: lambda z: a(z) ** b(z))(base, exponent)

    def atom(self) -> Callable:
        kind, value, pos = self.advance()
        if kind == "number":
            return (lambda c: lambda z: c)(_parse_number(value))
        if kind == "name":
            if self.accept_op("(") is not None:
                fn = self.functions.get(value)
                if fn is None:
                    raise ParseError(f"unknown function {value!r}", pos)
                argument = self.expr()
                self.expect_close(pos)
                return (lambda f, a: lambda z: f(a(z)))(fn, argument)
            if value == "z":
                return lambda z: z
            if value in _CONSTANTS:
                return (lambda c: lambda z: c)(_CONSTANTS[value])
            raise ParseError(f"unknown name {value!r}", pos)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_close(pos)
            return node
        raise ParseError(f"expected a value, got {value!r}", pos)

    def expect_close(self, open_pos: int) -> None:
        if self.accept_op(")") is None:
            kind, value, pos = self.peek()
            raise ParseError(
                f"unclosed parenthesis opened at {open_pos}"
                f" (found {value!r})",
                pos,
            )


def parse_expression(
    text: str,
    functions: Mapping[str, Callable] | None = None,
) -> Callable:
    """Compile an expression in z into a deterministic complex evaluator.

    functions maps extra single-argument names (beyond exp and conj) to
    callables, e.g. {"r": reflection}.  The returned evaluator raises
    EvalError when the formula is singular or non-finite at the point.
    """
    table = dict(_BUILTIN_FUNCTIONS)
    if functions:
        table.update(functions)
    node = _Parser(_tokenize(text), table).parse()

    def evaluator(z: complex) -> complex:
        try:
            value = complex(node(complex(z)))
        except ZeroDivisionError as exc:
            raise EvalError(f"{text!r} is singular at z = {z}") from exc
        except OverflowError as exc:
            raise EvalError(f"{text!r} overflows at z = {z}") from exc
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise EvalError(f"{text!r} is non-finite at z = {z}")
        return value

    evaluator.source = text
    return evaluator

"""Tiny expression grammar for numeric literals on the command line.

Supports integers, decimals, rationals, sqrt(...), the imaginary unit i,
unary minus, + - * / and parentheses, e.g. ``-1/2 + 2/5*sqrt(3)*i`` or
``i/sqrt(10)``.  Expressions are evaluated directly in double precision so
irrational entries do not lose accuracy to textual round trips.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .errors import ValidationError

_TOKEN = re.compile(r"\s*(?:(\d+\.\d+|\d+)|(sqrt)|(i)|([()+\-*/,]))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ValidationError(f"cannot parse expression near {text[pos:]!r}")
        tokens.append(match.group().strip())
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        token = self.peek()
        if token is None:
            raise ValidationError("unexpected end of expression")
        self.pos += 1
        return token

    def expect(self, token: str) -> None:
        got = self.take()
        if got != token:
            raise ValidationError(f"expected {token!r}, got {got!r}")

    def parse_expr(self) -> complex:
        value = self.parse_term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.parse_term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def parse_term(self) -> complex:
        value = self.parse_factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.parse_factor()
            if op == "*":
                value = value * rhs
            else:
                if rhs == 0:
                    raise ValidationError("division by zero in expression")
                value = value / rhs
        return value

    def parse_factor(self) -> complex:
        token = self.peek()
        if token == "-":
            self.take()
            return -self.parse_factor()
        if token == "+":
            self.take()
            return self.parse_factor()
        return self.parse_atom()

    def parse_atom(self) -> complex:
        token = self.take()
        if token == "(":
            value = self.parse_expr()
            self.expect(")")
            return value
        if token == "i":
            return 1j
        if token == "sqrt":
            self.expect("(")
            inner = self.parse_expr()
            self.expect(")")
            if abs(inner.imag) > 1e-15 or inner.real < 0:
                raise ValidationError("sqrt expects a nonnegative real argument")
            return complex(math.sqrt(inner.real))
        if re.fullmatch(r"\d+\.\d+|\d+", token):
            return complex(float(token))
        raise ValidationError(f"unexpected token {token!r}")


def parse_scalar(text: str) -> complex:
    tokens = _tokenize(text)
    parser = _Parser(tokens)
    value = parser.parse_expr()
    if parser.peek() is not None:
        raise ValidationError(f"trailing input {parser.peek()!r}")
    return value


def _split_entries(text: str) -> list[str]:
    entries = []
    depth = 0
    current = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            entries.append("".join(current))
            current = []
        else:
            current.append(ch)
    entries.append("".join(current))
    return entries


def parse_vector(text: str) -> np.ndarray:
    entries = _split_entries(text)
    if not any(e.strip() for e in entries):
        raise ValidationError("empty vector literal")
    return np.array([parse_scalar(e) for e in entries], dtype=complex)


def parse_real_vector(text: str) -> np.ndarray:
    values = parse_vector(text)
    if np.max(np.abs(values.imag)) > 1e-15:
        raise ValidationError("expected real entries")
    return values.real.copy()

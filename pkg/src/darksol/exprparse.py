"""Small arithmetic expression language for coefficient profiles.

Grammar (recursive descent):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-')* primary
    primary := NUMBER | 'pi' | NAME '(' expr ')' | NAME | '(' expr ')'

Supported functions are sin, cos and exp. Free variables are checked
at parse time against the caller's declared set, so a config typo is
reported with its position instead of surfacing later as a NameError.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ExpressionError

__all__ = ["CompiledExpression", "compile_expression"]

_FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}
_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
                    r"|\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        number, name, other = m.groups()
        if number is not None:
            tokens.append(("num", float(number), m.start(1)))
        elif name is not None:
            tokens.append(("name", name, m.start(2)))
        elif other.strip():
            if other not in "+-*/()":
                raise ExpressionError(
                    f"unexpected character {other!r} at position {m.start(3)}",
                    position=m.start(3))
            tokens.append(("op", other, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


@dataclass(frozen=True)
class CompiledExpression:
    """Parsed expression; evaluate with keyword bindings for its variables."""

    source: str
    variables: frozenset = field(default_factory=frozenset)
    _eval: object = None

    def __call__(self, **bindings):
        missing = self.variables - set(bindings)
        if missing:
            raise ExpressionError(
                f"unbound variable(s) {sorted(missing)} in {self.source!r}")
        return self._eval(bindings)


class _Parser:
    def __init__(self, text, allowed):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0
        self.allowed = allowed
        self.seen = set()

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def fail(self, message, pos):
        raise ExpressionError(f"{message} at position {pos} in {self.text!r}",
                              position=pos)

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.next()[1]
            rhs = self.term()
            if op == "+":
                node = (lambda a, b: lambda env: a(env) + b(env))(node, rhs)
            else:
                node = (lambda a, b: lambda env: a(env) - b(env))(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.next()[1]
            rhs = self.unary()
            if op == "*":
                node = (lambda a, b: lambda env: a(env) * b(env))(node, rhs)
            else:
                node = (lambda a, b: lambda env: a(env) / b(env))(node, rhs)
        return node

    def unary(self):
        sign = 1.0
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            if self.next()[1] == "-":
                sign = -sign
        node = self.primary()
        if sign < 0:
            return (lambda a: lambda env: -a(env))(node)
        return node

    def primary(self):
        kind, value, pos = self.next()
        if kind == "num":
            return lambda env, v=value: v
        if kind == "name":
            if value == "pi":
                return lambda env: math.pi
            if value in _FUNCTIONS:
                if self.peek()[:2] != ("op", "("):
                    self.fail(f"function {value!r} needs parentheses", pos)
                self.next()
                arg = self.expr()
                self._expect_close()
                fn = _FUNCTIONS[value]
                return (lambda a, f=fn: lambda env: f(a(env)))(arg)
            if value in self.allowed:
                self.seen.add(value)
                return lambda env, v=value: env[v]
            self.fail(f"unknown name {value!r}", pos)
        if kind == "op" and value == "(":
            node = self.expr()
            self._expect_close()
            return node
        self.fail("expected a number, name or '('", pos)

    def _expect_close(self):
        kind, value, pos = self.next()
        if (kind, value) != ("op", ")"):
            self.fail("expected ')'", pos)

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            self.fail(f"unexpected trailing input {value!r}", pos)
        return node, frozenset(self.seen)


def compile_expression(text, variables=("x",)):
    """Compile `text` into a CompiledExpression over the given variable names."""
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("empty expression")
    node, seen = _Parser(text, set(variables)).parse()
    return CompiledExpression(source=text, variables=seen,
                              _eval=lambda env, f=node: f(env))

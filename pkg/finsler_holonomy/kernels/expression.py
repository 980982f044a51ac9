"""Kernel files: a small arithmetic grammar parsed into sympy and compiled to jax.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | x<i> | y<i> | 'sqrt' '(' expr ')' | '(' expr ')'
"""

import json
import logging
import operator
import re
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import jax.numpy as jnp
import sympy

from ..errors import ConfigurationError
from .base import MetricKernel
from .builtin import RiemannianKernel

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)
_VARIABLE_RE = re.compile(r"^([xy])([1-9][0-9]*)$")


@dataclass
class Token:
    kind: str
    text: str
    column: int


def tokenize(source: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        match = _TOKEN_RE.match(source, pos)
        if not match or match.end() == pos:
            raise ConfigurationError(
                f"Unexpected character {source[pos:].lstrip()[:1]!r} at column {pos + 1}"
            )
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind) + 1))
        pos = match.end()
    tokens.append(Token("end", "", len(source) + 1))
    return tokens


class ExpressionParser:
    """Recursive-descent parser producing sympy expressions."""

    def __init__(self, source: str, dim: int, allow_y: bool = True):
        self.source = source
        self.dim = dim
        self.allow_y = allow_y
        self.tokens = tokenize(source)
        self.index = 0

    def parse(self) -> sympy.Expr:
        expr = self._expr()
        if self._peek().kind != "end":
            self._fail(f"unexpected {self._peek().text!r}")
        return expr

    def _peek(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _accept(self, text: str) -> bool:
        token = self._peek()
        if token.kind == "op" and token.text == text:
            self.index += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            self._fail(f"expected {text!r}")

    def _fail(self, message: str):
        token = self._peek()
        raise ConfigurationError(
            f"Cannot parse {self.source!r}: {message} at column {token.column}"
        )

    def _expr(self) -> sympy.Expr:
        value = self._term()
        while True:
            if self._accept("+"):
                value = value + self._term()
            elif self._accept("-"):
                value = value - self._term()
            else:
                return value

    def _term(self) -> sympy.Expr:
        value = self._unary()
        while True:
            if self._accept("*"):
                value = value * self._unary()
            elif self._accept("/"):
                value = value / self._unary()
            else:
                return value

    def _unary(self) -> sympy.Expr:
        if self._accept("-"):
            return -self._unary()
        if self._accept("+"):
            return self._unary()
        return self._power()

    def _power(self) -> sympy.Expr:
        base = self._atom()
        if self._accept("^"):
            return sympy.Pow(base, self._unary())
        return base

    def _atom(self) -> sympy.Expr:
        token = self._peek()
        if token.kind == "number":
            self._advance()
            if re.fullmatch(r"\d+", token.text):
                return sympy.Integer(int(token.text))
            return sympy.Rational(token.text)
        if token.kind == "name":
            self._advance()
            if token.text == "sqrt":
                self._expect("(")
                inner = self._expr()
                self._expect(")")
                return sympy.sqrt(inner)
            return self._variable(token)
        if self._accept("("):
            inner = self._expr()
            self._expect(")")
            return inner
        self._fail("expected a number, variable or '('")

    def _variable(self, token: Token) -> sympy.Symbol:
        match = _VARIABLE_RE.match(token.text)
        if not match:
            self._fail(f"unknown name {token.text!r}")
        kind, index = match.group(1), int(match.group(2))
        if index > self.dim:
            self._fail(f"{token.text} exceeds dimension {self.dim}")
        if kind == "y" and not self.allow_y:
            self._fail(f"{token.text} is not allowed here")
        return sympy.Symbol(token.text)


def parse_expression(source: str, dim: int, allow_y: bool = True) -> sympy.Expr:
    """Parse one expression over x1..xn (and y1..yn when allowed)."""
    if not isinstance(source, str):
        source = str(source)
    return ExpressionParser(source, dim, allow_y).parse()


def compile_expression(expr: sympy.Expr) -> Callable:
    """Turn a sympy tree into a jax-traceable callable f(x, y)."""
    if expr.is_Symbol:
        kind, index = _VARIABLE_RE.match(expr.name).groups()
        position = int(index) - 1
        if kind == "x":
            return lambda x, y: x[position]
        return lambda x, y: y[position]
    if expr.is_Number:
        value = float(expr)
        return lambda x, y: value
    if expr.is_Add or expr.is_Mul:
        parts = [compile_expression(arg) for arg in expr.args]
        combine = operator.add if expr.is_Add else operator.mul
        return lambda x, y: reduce(combine, (part(x, y) for part in parts))
    if expr.is_Pow:
        base_expr, exponent = expr.args
        base = compile_expression(base_expr)
        if exponent == sympy.Rational(1, 2):
            return lambda x, y: jnp.sqrt(base(x, y))
        if exponent == sympy.Rational(-1, 2):
            return lambda x, y: 1.0 / jnp.sqrt(base(x, y))
        if exponent.is_Integer:
            power = int(exponent)
            return lambda x, y: base(x, y) ** power
        if exponent.is_Number:
            real_power = float(exponent)
            return lambda x, y: jnp.power(base(x, y), real_power)
        exponent_fn = compile_expression(exponent)
        return lambda x, y: jnp.power(base(x, y), exponent_fn(x, y))
    raise ConfigurationError(f"Unsupported expression node {type(expr).__name__}: {expr}")


class ExpressionKernel(MetricKernel):
    """Kernel defined by a parsed F(x, y) and optional cone factors.

    Cone factors are expressions homogeneous of degree one in y; the cone is the
    set where all of them are positive.
    """

    def __init__(
        self,
        name: str,
        dim: int,
        function: sympy.Expr,
        cone: Optional[List[sympy.Expr]] = None,
        positive_definite: bool = False,
        sampling_margin: float = 0.0,
    ):
        self.name = name
        self.dim = dim
        self.expression = function
        self.cone_expressions = cone or []
        self.positive_definite_claim = positive_definite
        self.sampling_margin = sampling_margin
        self._function = compile_expression(function)
        self._factors = [compile_expression(f) for f in self.cone_expressions]

    def metric(self, x, y):
        return self._function(x, y)

    def cone_margin(self, x, y):
        norm = jnp.sqrt(jnp.sum(y * y))
        if not self._factors:
            return jnp.where(norm > 0, 1.0, 0.0)
        factors = jnp.stack([jnp.asarray(f(x, y), dtype=y.dtype) for f in self._factors])
        safe = jnp.where(norm > 0, norm, 1.0)
        return jnp.where(norm > 0, jnp.min(factors) / safe, 0.0)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"Kernel file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Kernel file {path} is not valid JSON: {e}")


def _dimension(raw: dict, path: str) -> int:
    dim = raw.get("dimension")
    if not isinstance(dim, int) or dim < 1:
        raise ConfigurationError(f"Kernel file {path}: 'dimension' must be a positive integer")
    return dim


def parse_metric_matrix(rows, dim: int) -> List[List[sympy.Expr]]:
    """Parse an n x n coefficient matrix over x1..xn and check its symmetry."""
    if not isinstance(rows, list) or len(rows) != dim or any(
        not isinstance(row, list) or len(row) != dim for row in rows
    ):
        raise ConfigurationError(f"'metric' must be a {dim}x{dim} list of expressions")
    matrix = [[parse_expression(entry, dim, allow_y=False) for entry in row] for row in rows]
    for i in range(dim):
        for j in range(i + 1, dim):
            if sympy.simplify(matrix[i][j] - matrix[j][i]) != 0:
                raise ConfigurationError(f"'metric' is not symmetric at ({i + 1}, {j + 1})")
    return matrix


def load_riemannian_file(path: str) -> RiemannianKernel:
    """Load ``{"name", "dimension", "metric": [[expr, ...], ...]}``."""
    raw = _read_json(path)
    dim = _dimension(raw, path)
    matrix = parse_metric_matrix(raw.get("metric"), dim)
    entries: List[Tuple[int, int, Callable]] = [
        (i, j, compile_expression(matrix[i][j])) for i in range(dim) for j in range(dim)
    ]

    def metric_matrix(x):
        values = [fn(x, None) for _, _, fn in entries]
        return jnp.reshape(jnp.stack([jnp.asarray(v, dtype=x.dtype) for v in values]), (dim, dim))

    name = raw.get("name") or f"riemannian:{Path(path).name}"
    logger.info(f"Loaded Riemannian kernel '{name}' (n={dim}) from {path}")
    kernel = RiemannianKernel(
        metric_matrix, dim=dim, name=name, positive_definite=raw.get("positive_definite", True)
    )
    kernel.expressions = matrix
    return kernel


def load_custom_file(path: str) -> ExpressionKernel:
    """Load ``{"name", "dimension", "function", "cone"?, "positive_definite"?}``.

    A file with a ``metric`` matrix instead of ``function`` defines the
    quadratic kernel g_ij(x) y^i y^j.
    """
    raw = _read_json(path)
    dim = _dimension(raw, path)
    if "function" in raw:
        function = parse_expression(raw["function"], dim)
    elif "metric" in raw:
        matrix = parse_metric_matrix(raw["metric"], dim)
        ys = [sympy.Symbol(f"y{i + 1}") for i in range(dim)]
        function = sympy.Add(
            *[matrix[i][j] * ys[i] * ys[j] for i in range(dim) for j in range(dim)]
        )
    else:
        raise ConfigurationError(f"Kernel file {path} needs 'function' or 'metric'")
    cone = [parse_expression(f, dim) for f in raw.get("cone", [])]
    unknown = set(raw) - {
        "name", "dimension", "function", "metric", "cone", "positive_definite", "sampling_margin",
    }
    if unknown:
        raise ConfigurationError(f"Kernel file {path} has unknown keys: {sorted(unknown)}")
    name = raw.get("name") or f"custom:{Path(path).name}"
    logger.info(f"Loaded custom kernel '{name}' (n={dim}) from {path}")
    return ExpressionKernel(
        name=name,
        dim=dim,
        function=function,
        cone=cone,
        positive_definite=bool(raw.get("positive_definite", False)),
        sampling_margin=float(raw.get("sampling_margin", 0.0)),
    )

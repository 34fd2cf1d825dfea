# symbols/parser.py
"""
Parser descendente recursivo del lenguaje de símbolos.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' entero)? | '-' factor
    atom   := número | ident | func '(' expr ')' | '(' expr ')'

Los decimales se leen como racionales exactos; el sufijo 'i' marca imaginario.
Los símbolos matriciales se escriben '[[e,e],[e,e]]'.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import sympy

from common.exceptions import DimensionMismatch, SymbolSyntaxError, UnknownIdentifier

from .expr import MatrixSymbol, SymbolExpr, phase_variables

FUNCTIONS = {
    "sin": sympy.sin,
    "cos": sympy.cos,
    "exp": sympy.exp,
    "sinh": sympy.sinh,
    "cosh": sympy.cosh,
    "tanh": sympy.tanh,
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),\[\]])
    """,
    re.VERBOSE,
)

_VAR_RE = re.compile(r"^(xi|x)(\d*)$")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SymbolSyntaxError(f"carácter inesperado {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


def resolve_variable(name: str, d: int, position: int | None = None) -> sympy.Symbol:
    """x/xi para d=1; x1..xd, xi1..xid para d>1."""
    m = _VAR_RE.match(name)
    if not m:
        raise UnknownIdentifier(name, position)
    base, suffix = m.groups()
    variables = phase_variables(d)
    offset = 0 if base == "x" else d

    if d == 1:
        if suffix:
            raise DimensionMismatch(f"{name!r} no existe con d=1 (use {base!r})")
        return variables[offset]

    if not suffix:
        raise DimensionMismatch(f"{name!r} requiere índice con d={d} (use {base}1..{base}{d})")
    j = int(suffix)
    if not 1 <= j <= d:
        raise DimensionMismatch(f"{name!r} fuera de rango para d={d}")
    return variables[offset + j - 1]


def _number(text: str) -> sympy.Expr:
    imaginary = text.endswith("i")
    frac = Fraction(text[:-1] if imaginary else text)
    value = sympy.Rational(frac.numerator, frac.denominator)
    return value * sympy.I if imaginary else value


class _Parser:
    def __init__(self, text: str, d: int):
        self.text = text
        self.d = d
        self.tokens = tokenize(text)
        self.i = 0

    # -- utilidades -------------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not (self.tok.kind == "op" and self.tok.text == text):
            found = self.tok.text or "fin de texto"
            raise SymbolSyntaxError(f"se esperaba {text!r}, se encontró {found!r}", self.tok.pos)
        return self.advance()

    def finish(self) -> None:
        if self.tok.kind != "end":
            raise SymbolSyntaxError(f"token sobrante {self.tok.text!r}", self.tok.pos)

    # -- gramática --------------------------------------------------------------
    def expr(self) -> sympy.Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self) -> sympy.Expr:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            rhs = self.factor()
            node = node * rhs if op == "*" else node / rhs
        return node

    def factor(self) -> sympy.Expr:
        if self.accept("-"):
            return -self.factor()
        base = self.atom()
        if self.accept("^"):
            tok = self.tok
            if tok.kind != "number" or not tok.text.isdigit():
                raise SymbolSyntaxError("el exponente debe ser un entero no negativo (usar 1/x^n)", tok.pos)
            self.advance()
            base = base ** int(tok.text)
        return base

    def atom(self) -> sympy.Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return _number(tok.text)
        if tok.kind == "ident":
            self.advance()
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return FUNCTIONS[tok.text](arg)
            return resolve_variable(tok.text, self.d, tok.pos)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "fin de texto"
        raise SymbolSyntaxError(f"se esperaba un operando, se encontró {found!r}", tok.pos)

    def matrix(self) -> list[list[sympy.Expr]]:
        self.expect("[")
        rows = [self.row()]
        while self.accept(","):
            rows.append(self.row())
        self.expect("]")
        return rows

    def row(self) -> list[sympy.Expr]:
        self.expect("[")
        entries = [self.expr()]
        while self.accept(","):
            entries.append(self.expr())
        self.expect("]")
        return entries


def parse(text: str, d: int) -> SymbolExpr:
    """Texto -> SymbolExpr escalar."""
    if d < 1:
        raise DimensionMismatch(f"d debe ser positivo (recibido {d})")
    p = _Parser(text, d)
    if p.tok.kind == "end":
        raise SymbolSyntaxError("expresión vacía", 0)
    node = p.expr()
    p.finish()
    return SymbolExpr(node, d)


def parse_matrix(text: str, d: int) -> MatrixSymbol:
    if d < 1:
        raise DimensionMismatch(f"d debe ser positivo (recibido {d})")
    p = _Parser(text, d)
    rows = p.matrix()
    p.finish()
    k = len(rows)
    if any(len(row) != k for row in rows):
        raise DimensionMismatch(f"la matriz debe ser cuadrada ({k} filas con largos {[len(r) for r in rows]})")
    return MatrixSymbol(tuple(tuple(SymbolExpr(e, d) for e in row) for row in rows), d)


def parse_symbol(text: str, d: int) -> SymbolExpr | MatrixSymbol:
    """Escalar o matricial según el primer carácter no blanco."""
    if text.lstrip().startswith("["):
        return parse_matrix(text, d)
    return parse(text, d)

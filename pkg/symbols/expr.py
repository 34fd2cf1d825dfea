# symbols/expr.py
"""
Tipos del núcleo de símbolos.

Un símbolo es una expresión cerrada en las variables de espacio de fase
(x_1..x_d, xi_1..xi_d). Internamente es un árbol de sympy restringido al
conjunto de funciones sin, cos, exp, sinh, cosh, tanh (cerrado bajo derivación).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy

from common.exceptions import DimensionMismatch, DivisionByZero, NonFinite

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def phase_variables(d: int) -> tuple[sympy.Symbol, ...]:
    """(x_1..x_d, xi_1..xi_d); para d=1 los nombres son x, xi."""
    if d < 1:
        raise DimensionMismatch(f"d debe ser positivo (recibido {d})")
    if d == 1:
        names = ["x", "xi"]
    else:
        names = [f"x{j}" for j in range(1, d + 1)] + [f"xi{j}" for j in range(1, d + 1)]
    return tuple(sympy.Symbol(n, real=True) for n in names)


def as_sympy_number(v) -> sympy.Expr:
    """Enteros quedan exactos (polinomios con coeficientes racionales)."""
    v = complex(v)
    parts = []
    for part in (v.real, v.imag):
        parts.append(sympy.Integer(int(part)) if float(part).is_integer() else sympy.Float(part))
    return parts[0] + parts[1] * sympy.I


# -----------------------------------------------------------------------------
# PhasePoint / MultiIndex
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class PhasePoint:
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords or len(coords) % 2:
            raise DimensionMismatch(f"un punto de fase necesita 2d coordenadas (recibidas {len(coords)})")
        if not all(math.isfinite(c) for c in coords):
            raise NonFinite(coords, "coordenadas no finitas")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: float) -> "PhasePoint":
        if len(coords) == 1 and isinstance(coords[0], (list, tuple, np.ndarray)):
            coords = tuple(coords[0])
        return cls(tuple(coords))

    @classmethod
    def zero(cls, d: int) -> "PhasePoint":
        return cls((0.0,) * (2 * d))

    @classmethod
    def axis(cls, d: int, j: int, magnitude: float) -> "PhasePoint":
        """Desplazamiento a lo largo del eje coordenado j (0-based)."""
        coords = [0.0] * (2 * d)
        coords[j] = float(magnitude)
        return cls(tuple(coords))

    @property
    def d(self) -> int:
        return len(self.coords) // 2

    @property
    def x(self) -> tuple[float, ...]:
        return self.coords[: self.d]

    @property
    def xi(self) -> tuple[float, ...]:
        return self.coords[self.d:]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        _check_same_d(self.d, other.d)
        return PhasePoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(tuple(-c for c in self.coords))

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class MultiIndex:
    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(o) for o in self.orders)
        if not orders or len(orders) % 2:
            raise DimensionMismatch(f"un multi-índice necesita 2d entradas (recibidas {len(orders)})")
        if any(o < 0 for o in orders):
            raise ValueError("los multi-índices no admiten órdenes negativos")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def of(cls, *orders: int) -> "MultiIndex":
        if len(orders) == 1 and isinstance(orders[0], (list, tuple)):
            orders = tuple(orders[0])
        return cls(tuple(orders))

    @classmethod
    def unit(cls, d: int, j: int) -> "MultiIndex":
        orders = [0] * (2 * d)
        orders[j] = 1
        return cls(tuple(orders))

    @property
    def d(self) -> int:
        return len(self.orders) // 2

    @property
    def order(self) -> int:
        return sum(self.orders)

    def __iter__(self):
        return iter(self.orders)


def multi_indices(d: int, order: int) -> list[MultiIndex]:
    """Todos los gamma con |gamma| = order, en orden lexicográfico descendente."""
    out: list[MultiIndex] = []

    def _rec(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            out.append(MultiIndex(tuple(prefix + [remaining])))
            return
        for v in range(remaining, -1, -1):
            _rec(prefix + [v], remaining - v, slots - 1)

    _rec([], order, 2 * d)
    return out


def _check_same_d(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch(f"d={a} frente a d={b}")


def _as_points(points, d: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 2 * d:
        raise DimensionMismatch(f"los puntos deben tener {2 * d} coordenadas (última dimensión {pts.shape[-1]})")
    return pts


# -----------------------------------------------------------------------------
# SymbolExpr
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SymbolExpr:
    expr: sympy.Expr
    d: int

    k = 1

    def __post_init__(self):
        expr = sympy.sympify(self.expr)
        allowed = set(phase_variables(self.d))
        extra = expr.free_symbols - allowed
        if extra:
            raise DimensionMismatch(f"variables {sorted(str(s) for s in extra)} no pertenecen a d={self.d}")
        object.__setattr__(self, "expr", expr)

    # -- construcción -----------------------------------------------------------
    @classmethod
    def constant(cls, value, d: int) -> "SymbolExpr":
        return cls(as_sympy_number(value), d)

    @classmethod
    def variable(cls, index: int, d: int) -> "SymbolExpr":
        return cls(phase_variables(d)[index], d)

    @property
    def variables(self) -> tuple[sympy.Symbol, ...]:
        return phase_variables(self.d)

    # -- evaluación ---------------------------------------------------------------
    @cached_property
    def _fn(self):
        return sympy.lambdify(self.variables, self.expr, modules="numpy")

    def evaluate_grid(self, points) -> np.ndarray:
        """Evalúa en un arreglo (..., 2d) de puntos reales; retorna complejos (...)."""
        pts = _as_points(points, self.d)
        shape = pts.shape[:-1]
        if self.expr.has(sympy.zoo, sympy.nan):
            # 1/0 literal: sympy ya lo plegó a zoo
            raise DivisionByZero(pts.reshape(-1, 2 * self.d)[0] if pts.size else None)
        cols = [pts[..., i] for i in range(2 * self.d)]
        try:
            with np.errstate(divide="raise", invalid="raise", over="raise"):
                raw = self._fn(*cols)
        except FloatingPointError as exc:
            point = self._first_bad_point(cols, pts)
            if "divide" in str(exc):
                raise DivisionByZero(point) from exc
            raise NonFinite(point, f"evaluación inválida ({exc})") from exc
        except ZeroDivisionError as exc:
            raise DivisionByZero(pts.reshape(-1, 2 * self.d)[0] if pts.size else None) from exc

        values = np.broadcast_to(np.asarray(raw, dtype=complex), shape).copy()
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise NonFinite(pts[tuple(bad)])
        return values

    def _first_bad_point(self, cols, pts):
        with np.errstate(all="ignore"):
            try:
                raw = np.broadcast_to(np.asarray(self._fn(*cols), dtype=complex), pts.shape[:-1])
            except ZeroDivisionError:
                return None
        bad = np.argwhere(~np.isfinite(raw))
        if not len(bad):
            return None
        return pts[tuple(bad[0])]

    def evaluate(self, z) -> complex:
        z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
        _check_same_d(self.d, z.d)
        return complex(self.evaluate_grid(z.as_array())[()])

    # -- cálculo --------------------------------------------------------------
    def differentiate(self, gamma: MultiIndex | Sequence[int]) -> "SymbolExpr":
        gamma = gamma if isinstance(gamma, MultiIndex) else MultiIndex.of(gamma)
        _check_same_d(self.d, gamma.d)
        expr = self.expr
        for var, order in zip(self.variables, gamma.orders):
            if order:
                expr = sympy.diff(expr, var, order)
        return SymbolExpr(expr, self.d)

    def shift(self, z: PhasePoint | Sequence[float]) -> "SymbolExpr":
        """g(w) = f(w + z)."""
        z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
        _check_same_d(self.d, z.d)
        mapping = {v: v + as_sympy_number(c) for v, c in zip(self.variables, z.coords) if c != 0.0}
        if not mapping:
            return self
        return SymbolExpr(self.expr.xreplace(mapping), self.d)

    def is_polynomial(self) -> bool:
        return bool(self.expr.is_polynomial(*self.variables))

    def is_constant(self) -> bool:
        return not self.expr.free_symbols

    def is_real(self) -> bool:
        return bool(self.expr.is_real)

    def depends_on(self, index: int) -> bool:
        return self.variables[index] in self.expr.free_symbols

    def to_text(self) -> str:
        from .printer import to_text

        return to_text(self.expr)

    # -- aritmética -----------------------------------------------------------
    def _coerce(self, other) -> sympy.Expr:
        if isinstance(other, SymbolExpr):
            _check_same_d(self.d, other.d)
            return other.expr
        return as_sympy_number(other)

    def __add__(self, other):
        if isinstance(other, MatrixSymbol):
            return NotImplemented
        return SymbolExpr(self.expr + self._coerce(other), self.d)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, MatrixSymbol):
            return NotImplemented
        return SymbolExpr(self.expr - self._coerce(other), self.d)

    def __rsub__(self, other):
        return SymbolExpr(self._coerce(other) - self.expr, self.d)

    def __mul__(self, other):
        if isinstance(other, MatrixSymbol):
            return NotImplemented
        return SymbolExpr(self.expr * self._coerce(other), self.d)

    __rmul__ = __mul__

    def __neg__(self):
        return SymbolExpr(-self.expr, self.d)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"SymbolExpr({self.to_text()!r}, d={self.d})"


# -----------------------------------------------------------------------------
# MatrixSymbol
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class MatrixSymbol:
    entries: tuple[tuple[SymbolExpr, ...], ...]
    d: int

    def __post_init__(self):
        rows = tuple(tuple(e if isinstance(e, SymbolExpr) else SymbolExpr(e, self.d) for e in row) for row in self.entries)
        k = len(rows)
        if k == 0 or any(len(row) != k for row in rows):
            raise DimensionMismatch("un símbolo matricial debe ser cuadrado")
        for row in rows:
            for e in row:
                _check_same_d(self.d, e.d)
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], d: int) -> "MatrixSymbol":
        return cls(tuple(tuple(row) for row in rows), d)

    @property
    def k(self) -> int:
        return len(self.entries)

    def _map(self, fn) -> "MatrixSymbol":
        return MatrixSymbol(tuple(tuple(fn(e) for e in row) for row in self.entries), self.d)

    def evaluate_grid(self, points) -> np.ndarray:
        pts = _as_points(points, self.d)
        out = np.empty(pts.shape[:-1] + (self.k, self.k), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                out[..., i, j] = e.evaluate_grid(pts)
        return out

    def evaluate(self, z) -> np.ndarray:
        z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
        _check_same_d(self.d, z.d)
        return self.evaluate_grid(z.as_array())

    def differentiate(self, gamma) -> "MatrixSymbol":
        return self._map(lambda e: e.differentiate(gamma))

    def shift(self, z) -> "MatrixSymbol":
        return self._map(lambda e: e.shift(z))

    def is_polynomial(self) -> bool:
        return all(e.is_polynomial() for row in self.entries for e in row)

    def is_constant(self) -> bool:
        return all(e.is_constant() for row in self.entries for e in row)

    def depends_on(self, index: int) -> bool:
        return any(e.depends_on(index) for row in self.entries for e in row)

    def to_text(self) -> str:
        return "[" + ",".join("[" + ",".join(e.to_text() for e in row) + "]" for row in self.entries) + "]"

    def _zip(self, other, fn) -> "MatrixSymbol":
        if isinstance(other, MatrixSymbol):
            _check_same_d(self.d, other.d)
            if other.k != self.k:
                raise DimensionMismatch(f"k={self.k} frente a k={other.k}")
            return MatrixSymbol(
                tuple(tuple(fn(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)),
                self.d,
            )
        # escalar o SymbolExpr: multiplica la identidad
        return self._zip(MatrixSymbol.identity(self.k, self.d, other), fn)

    @classmethod
    def identity(cls, k: int, d: int, scale=1) -> "MatrixSymbol":
        scale = scale if isinstance(scale, SymbolExpr) else SymbolExpr.constant(scale, d)
        zero = SymbolExpr.constant(0, d)
        return cls(tuple(tuple(scale if i == j else zero for j in range(k)) for i in range(k)), d)

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MatrixSymbol):
            raise TypeError("producto matricial de símbolos no soportado")
        return self._map(lambda e: e * other)

    __rmul__ = __mul__

    def __neg__(self):
        return self._map(lambda e: -e)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MatrixSymbol({self.to_text()!r}, d={self.d})"


Symbol = SymbolExpr | MatrixSymbol


# -----------------------------------------------------------------------------
# Operaciones de nivel de módulo
# -----------------------------------------------------------------------------
def evaluate(f: Symbol, z) -> complex | np.ndarray:
    return f.evaluate(z)


def differentiate(f: Symbol, gamma) -> Symbol:
    return f.differentiate(gamma)


def shift(f: Symbol, z) -> Symbol:
    return f.shift(z)

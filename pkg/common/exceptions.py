# common/exceptions.py
"""
Jerarquía única de errores del laboratorio.

Los comandos traducen:
  - SymbolParseError / InvalidConfig -> exit 2
  - cualquier otro WeylLabError      -> exit 3
"""
from __future__ import annotations


class WeylLabError(Exception):
    """Base de todos los errores propios."""


# -----------------------------------------------------------------------------
# Lenguaje de símbolos
# -----------------------------------------------------------------------------
class SymbolParseError(WeylLabError):
    pass


class SymbolSyntaxError(SymbolParseError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"Error de sintaxis en la posición {position}: {message}")


class UnknownIdentifier(SymbolParseError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        self.position = position
        super().__init__(f"Identificador desconocido: {name!r}")


class DimensionMismatch(SymbolParseError):
    def __init__(self, message: str):
        super().__init__(f"Dimensión inconsistente: {message}")


class InvalidConfig(WeylLabError):
    pass


# -----------------------------------------------------------------------------
# Evaluación numérica
# -----------------------------------------------------------------------------
class EvaluationError(WeylLabError):
    def __init__(self, message: str, point=None):
        self.point = None if point is None else tuple(float(c) for c in point)
        if self.point is not None:
            message = f"{message} en el punto {self.point}"
        super().__init__(message)


class DivisionByZero(EvaluationError):
    def __init__(self, point=None):
        super().__init__("División por cero", point)


class NonFinite(EvaluationError):
    def __init__(self, point=None, detail: str = "valor no finito"):
        super().__init__(detail, point)


# -----------------------------------------------------------------------------
# Cuadratura / truncación
# -----------------------------------------------------------------------------
class CostGuard(WeylLabError):
    pass


class MethodMismatch(WeylLabError):
    pass


class UnsupportedDimension(WeylLabError):
    pass


class GridTooCoarse(WeylLabError):
    def __init__(self, message: str, change: float | None = None):
        self.change = change
        super().__init__(message)


class TailGuard(WeylLabError):
    pass


class QuadratureUnconverged(WeylLabError):
    def __init__(self, message: str, change: float | None = None):
        self.change = change
        super().__init__(message)


class BoxTooSmall(WeylLabError):
    pass


class Unconverged(WeylLabError):
    pass


class InsufficientSamples(WeylLabError):
    pass


def exit_code_for(exc: BaseException) -> int:
    """Código de salida estable para la CLI."""
    if isinstance(exc, (SymbolParseError, InvalidConfig)):
        return 2
    return 3

# symbols/printer.py
"""Impresión de símbolos en la misma gramática que acepta el parser."""
from __future__ import annotations

import sympy
from sympy.printing.precedence import PRECEDENCE
from sympy.printing.str import StrPrinter


class SymbolPrinter(StrPrinter):
    printmethod = "_weyl_text"

    def _print_Pow(self, expr, rational=False):
        base, exp = expr.as_base_exp()
        if not exp.is_Integer:
            raise ValueError(f"exponente no entero no representable: {exp}")
        n = int(exp)
        b = self.parenthesize(base, PRECEDENCE["Pow"], strict=True)
        if n == -1:
            return f"1/{b}"
        if n < 0:
            return f"1/{b}^{-n}"
        return f"{b}^{n}"

    def _print_ImaginaryUnit(self, expr):
        return "1i"

    def _print_Float(self, expr):
        return repr(float(expr))

    def _print_Exp1(self, expr):
        return "exp(1)"

    def _print_Pi(self, expr):
        return repr(float(sympy.pi))

    def _print_Rational(self, expr):
        return f"{expr.p}/{expr.q}" if expr.q != 1 else str(expr.p)


_printer = SymbolPrinter()


def to_text(expr: sympy.Expr) -> str:
    return _printer.doprint(expr)

# fock/oracles.py
"""
Oráculos lentos de fuerza bruta.

Cada oráculo recalcula un valor por un camino independiente del camino rápido
(cuadratura directa en lugar de álgebra matricial) y devuelve ambos con su
diferencia. Son la referencia de los tests y del comando weyl_oracle.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from symbols.expr import PhasePoint, SymbolExpr

from .hermite import gauss_hermite_physical, hermite_derivatives, hermite_functions
from .ladder import ladder_matrices, momentum, position
from .matrices import FockMatrix
from .quantize import quantize, quantize_kernel, quantize_monomial
from .weyl import PROJECTIVE_PHASE, symplectic_form, weyl_operator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    subject: str
    oracle: complex
    fast: complex
    params: dict = field(default_factory=dict)

    @property
    def difference(self) -> float:
        return float(abs(complex(self.oracle) - complex(self.fast)))

    def as_dict(self) -> dict:
        def _num(v):
            v = complex(v)
            return v.real if v.imag == 0 else [v.real, v.imag]

        return {
            "subject": self.subject,
            "oracle": _num(self.oracle),
            "fast": _num(self.fast),
            "difference": self.difference,
            "params": self.params,
        }


# -----------------------------------------------------------------------------
# Escalera
# -----------------------------------------------------------------------------
def ladder_entry(row: int = 0, col: int = 1, N: int = 64) -> OracleResult:
    """∫ phi_m(y) y phi_n(y) dy por Gauss-Hermite frente a Q[m, n]."""
    order = max(row, col) + 8
    y, w = gauss_hermite_physical(order)
    phi = hermite_functions(max(row, col), y)
    oracle = float(np.sum(w * phi[row] * y * phi[col]))
    fast = position(N)[row, col]
    return OracleResult("ladder-entry", oracle, fast, {"row": row, "col": col, "N": N})


def momentum_entry(row: int = 0, col: int = 1, N: int = 64) -> OracleResult:
    """∫ phi_m(y) (-i phi_n'(y)) dy frente a P[m, n]."""
    order = max(row, col) + 8
    y, w = gauss_hermite_physical(order)
    phi = hermite_functions(max(row, col), y)
    dphi = hermite_derivatives(max(row, col), y)
    oracle = -1j * np.sum(w * phi[row] * dphi[col])
    fast = momentum(N)[row, col]
    return OracleResult("momentum-entry", oracle, fast, {"row": row, "col": col, "N": N})


def harmonic_level(level: int = 0, N: int = 64) -> OracleResult:
    """Autovalor de (Q^2+P^2)/2 por aritmética de matrices frente a op((x^2+xi^2)/2)."""
    Qs, Ps = ladder_matrices(N)
    q, p = Qs[0].entries, Ps[0].entries
    oracle_matrix = (q @ q + p @ p) / 2
    oracle = np.sort(np.linalg.eigvalsh(oracle_matrix[: N - 2, : N - 2]))[level]
    fast_matrix = quantize_monomial((2,), (0,), N).entries + quantize_monomial((0,), (2,), N).entries
    fast = np.sort(np.linalg.eigvalsh(fast_matrix / 2))[level]
    return OracleResult("harmonic", oracle, fast, {"level": level, "N": N, "exact": level + 0.5})


# -----------------------------------------------------------------------------
# Elementos de matriz por cuadratura directa (sin factorizar el núcleo)
# -----------------------------------------------------------------------------
def cross_wigner(m: int, n: int, s: np.ndarray, xi: np.ndarray, t_points: int = 801) -> np.ndarray:
    """
    W_mn(s, ξ) = (2π)^{-1} ∫ e^{itξ} phi_m(s + t/2) phi_n(s - t/2) dt,
    así <phi_m, op(f) phi_n> = ∬ f(s, ξ) W_mn(s, ξ) ds dξ.
    """
    # |s ± t/2| debe caer en el soporte de ambas funciones: |t| <= 2 * soporte
    span = 2.0 * (np.sqrt(2.0 * max(m, n) + 1.0) + 6.0)
    t = np.linspace(-span, span, t_points)
    weights = np.full(t.size, t[1] - t[0])
    weights[[0, -1]] *= 0.5
    top = max(m, n)
    phi_plus = hermite_functions(top, s[:, None] + t[None, :] / 2)[m]
    phi_minus = hermite_functions(top, s[:, None] - t[None, :] / 2)[n]
    fourier = np.exp(1j * t[:, None] * xi[None, :]) * weights[:, None]
    return (phi_plus * phi_minus) @ fourier / (2.0 * np.pi)


def kernel_element(f: SymbolExpr, m: int = 0, n: int = 0, N: int = 32, half_width: float = 9.0, points: int = 181) -> OracleResult:
    if f.d != 1:
        raise ValueError("el oráculo de elementos de matriz es de d=1")
    s = np.linspace(-half_width, half_width, points)
    xi = np.linspace(-half_width, half_width, points)
    W = cross_wigner(m, n, s, xi)
    S, XI = np.meshgrid(s, xi, indexing="ij")
    values = f.evaluate_grid(np.stack([S, XI], axis=-1))
    oracle = np.trapezoid(np.trapezoid(values * W, xi, axis=1), s, axis=0)
    fast = quantize_kernel(f, N).entries[m, n]
    return OracleResult("kernel-element", oracle, fast, {"symbol": f.to_text(), "m": m, "n": n, "N": N})


# -----------------------------------------------------------------------------
# Operadores de Weyl a partir de la acción explícita
# -----------------------------------------------------------------------------
Wavefunction = Callable[[np.ndarray], np.ndarray]


def explicit_action(z: PhasePoint, g: Wavefunction) -> Wavefunction:
    """(A_z g)(y) = exp(-i y ξ + (i/2) x ξ) g(y - x)."""
    x, xi = z.x[0], z.xi[0]

    def _shifted(y):
        return np.exp(-1j * y * xi + 0.5j * x * xi) * g(y - x)

    return _shifted


def hermite_wavefunction(n: int) -> Wavefunction:
    return lambda y: hermite_functions(n, y)[n]


def reflect(z: PhasePoint) -> PhasePoint:
    """A_{(x,ξ)} coincide con la matriz W_{(-x,ξ)}."""
    return PhasePoint(tuple(-c for c in z.x) + z.xi)


def _inner(u: Wavefunction, v: Wavefunction, half_width: float, points: int = 4001) -> complex:
    y = np.linspace(-half_width, half_width, points)
    return complex(np.trapezoid(np.conj(u(y)) * v(y), y))


def weyl_overlap(z, m: int = 0, n: int = 0, N: int = 64) -> OracleResult:
    """<phi_m, A_z phi_n> por cuadratura frente a W_{(-x,ξ)}[m, n]."""
    z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
    R = 12.0 + abs(z.x[0]) + np.sqrt(2.0 * max(m, n) + 1.0)
    oracle = _inner(hermite_wavefunction(m), explicit_action(z, hermite_wavefunction(n)), R)
    fast = weyl_operator(reflect(z), N).entries[m, n]
    return OracleResult("weyl-overlap", oracle, fast, {"z": list(z.coords), "m": m, "n": n, "N": N})


def projective_phase(z, w, N: int = 64) -> OracleResult:
    """
    Escalar de W_z W_w = c W_{z+w}: por la acción explícita (en puntos reflejados)
    y por el producto de exponenciales de matriz.
    """
    z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
    w = w if isinstance(w, PhasePoint) else PhasePoint.of(w)
    rz, rw = reflect(z), reflect(w)
    R = 14.0 + abs(z.x[0]) + abs(w.x[0])
    vac = hermite_wavefunction(0)
    composed = _inner(vac, explicit_action(rz, explicit_action(rw, vac)), R)
    direct = _inner(vac, explicit_action(rz + rw, vac), R)
    oracle = composed / direct

    Wz, Ww, Wzw = (weyl_operator(p, N).entries for p in (z, w, z + w))
    fast = (Wz @ Ww)[0, 0] / Wzw[0, 0]
    predicted = np.exp(PROJECTIVE_PHASE * symplectic_form(z, w))
    return OracleResult(
        "projective-phase",
        oracle,
        fast,
        {"z": list(z.coords), "w": list(w.coords), "N": N, "predicted": [predicted.real, predicted.imag]},
    )


def symmetrized_product(N: int = 32) -> FockMatrix:
    """(QP + PQ)/2 por aritmética directa de la escalera (referencia de op(x ξ))."""
    q, p = position(N + 2), momentum(N + 2)
    return FockMatrix(((q @ p + p @ q) / 2)[:N, :N], N)


def method_agreement(f: SymbolExpr, N: int = 96, block: int = 16) -> OracleResult:
    """max |MONOMIAL - KERNEL| en el bloque principal."""
    mono = quantize(f, N, "MONOMIAL").entries[:block, :block]
    kern = quantize(f, N, "KERNEL").entries[:block, :block]
    return OracleResult("method-agreement", 0.0, float(np.max(np.abs(mono - kern))), {"symbol": f.to_text(), "N": N, "block": block})

# calculus/derivatives.py
"""
Cálculo en espacio de fase a nivel de matrices.

  ∂_w A = i [σ(w, R), A]           (derivada de la forma)
  ∂^γ op(f) = op(∂^γ f)            (entrelazado)
  W_z op(f) W_{-z} = op(f(· + z))  (covarianza)

Los residuos se miden en el bloque de confianza n_j < M, M <= N/2: los
conmutadores con Q y P contaminan los niveles cercanos al corte.
"""
from __future__ import annotations

import logging

import numpy as np

from common.choices import Method
from common.exceptions import DimensionMismatch
from fock.matrices import FockMatrix, operator_norm
from fock.quantize import QuadratureConfig, quantize
from fock.weyl import weyl_generator, weyl_operator
from symbols.expr import MatrixSymbol, MultiIndex, PhasePoint, SymbolExpr

logger = logging.getLogger(__name__)


def _check_trusted(N: int, M: int) -> None:
    if M > N // 2:
        raise DimensionMismatch(f"el bloque de confianza requiere M <= N/2 (M={M}, N={N})")


def sigma_matrix(w: PhasePoint, N: int, d: int = 1, k: int = 1) -> np.ndarray:
    """σ(w, R) = w_x·P - w_ξ·Q con identidad en C^k."""
    return weyl_generator(w, N, d, k)


def form_derivative(A: FockMatrix, w) -> FockMatrix:
    w = w if isinstance(w, PhasePoint) else PhasePoint.of(w)
    if w.d != A.d:
        raise DimensionMismatch(f"dirección con d={w.d}, matriz con d={A.d}")
    s = sigma_matrix(w, A.N, A.d, A.k)
    a = A.entries
    return A.with_entries(1j * (s @ a - a @ s), method=Method.COMMUTATOR)


def nested_derivative(A: FockMatrix, gamma) -> FockMatrix:
    """∂^γ como conmutadores anidados a lo largo de los ejes coordenados."""
    gamma = gamma if isinstance(gamma, MultiIndex) else MultiIndex.of(gamma)
    if gamma.d != A.d:
        raise DimensionMismatch(f"multi-índice con d={gamma.d}, matriz con d={A.d}")
    out = A
    for axis, order in enumerate(gamma.orders):
        direction = PhasePoint.axis(A.d, axis, 1.0)
        for _ in range(order):
            out = form_derivative(out, direction)
    if gamma.order == 0:
        out = out.with_entries(out.entries, method=Method.COMMUTATOR)
    return out


def restricted_norm(A: FockMatrix | np.ndarray, M: int, like: FockMatrix | None = None) -> float:
    """||P_M A P_M||."""
    ref = A if isinstance(A, FockMatrix) else like
    entries = A.entries if isinstance(A, FockMatrix) else A
    block = FockMatrix(entries, ref.N, ref.d, ref.k).restrict(M)
    return operator_norm(block)


def intertwining_residual(
    f: SymbolExpr | MatrixSymbol,
    gamma,
    N: int,
    M: int,
    method: str = "AUTO",
    cfg: QuadratureConfig | None = None,
) -> float:
    _check_trusted(N, M)
    gamma = gamma if isinstance(gamma, MultiIndex) else MultiIndex.of(gamma)
    lhs = nested_derivative(quantize(f, N, method, cfg), gamma)
    rhs = quantize(f.differentiate(gamma), N, method, cfg)
    residual = restricted_norm(lhs.entries - rhs.entries, M, like=lhs)
    logger.info("intertwining_residual gamma=%s N=%d M=%d: %.3e", gamma.orders, N, M, residual)
    return residual


def covariance_residual(
    f: SymbolExpr | MatrixSymbol,
    z,
    N: int,
    M: int,
    method: str = "AUTO",
    cfg: QuadratureConfig | None = None,
) -> float:
    """||P_M (W_z op(f) W_{-z} - op(f(· + z))) P_M||."""
    _check_trusted(N, M)
    z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
    A = quantize(f, N, method, cfg)
    W = weyl_operator(z, N, f.d, getattr(f, "k", 1)).entries
    conjugated = W @ A.entries @ W.conj().T
    shifted = quantize(f.shift(z), N, method, cfg)
    residual = restricted_norm(conjugated - shifted.entries, M, like=A)
    logger.info("covariance_residual z=%s N=%d M=%d: %.3e", z.coords, N, M, residual)
    return residual

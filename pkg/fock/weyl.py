# fock/weyl.py
"""
Operadores de Weyl W_z = exp(i σ(z, R)), σ((x,ξ), R) = x·P - ξ·Q.

Con esta orientación W_z Q W_z^* = Q + x, W_z P W_z^* = P + ξ, y

    W_z W_w = exp(-(i/2) σ(z, w)) W_{z+w}.
"""
from __future__ import annotations

import logging

import numpy as np
from django.conf import settings
from scipy.linalg import expm

from common.choices import Method
from common.exceptions import DimensionMismatch, TailGuard
from symbols.expr import PhasePoint

from .ladder import momentum, position
from .matrices import FockMatrix, lift, operator_norm  # noqa: F401  (operator_norm se reexporta)

logger = logging.getLogger(__name__)

# coeficiente c de exp(c σ(z,w)); fijado contra la acción explícita (ver fock.oracles)
PROJECTIVE_PHASE = -0.5j


def symplectic_form(z: PhasePoint, w: PhasePoint) -> float:
    """σ((x,ξ),(y,η)) = x·η - y·ξ."""
    if z.d != w.d:
        raise DimensionMismatch(f"d={z.d} frente a d={w.d}")
    return float(np.dot(z.x, w.xi) - np.dot(w.x, z.xi))


def projective_phase(z: PhasePoint, w: PhasePoint) -> complex:
    return complex(np.exp(PROJECTIVE_PHASE * symplectic_form(z, w)))


def weyl_generator(z: PhasePoint, N: int, d: int, k: int = 1) -> np.ndarray:
    """σ(z, R) como matriz hermitiana: Σ_j x_j P_j - ξ_j Q_j."""
    if z.d != d:
        raise DimensionMismatch(f"punto con d={z.d}, base con d={d}")
    q, p = position(N), momentum(N)
    side = N**d * k
    out = np.zeros((side, side), dtype=complex)
    for j in range(d):
        if z.x[j]:
            out += z.x[j] * lift(p, j, d, k)
        if z.xi[j]:
            out -= z.xi[j] * lift(q, j, d, k)
    return out


def weyl_operator(z, N: int, d: int | None = None, k: int = 1, max_shift: float | None = None) -> FockMatrix:
    z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
    d = d or z.d
    max_shift = float(max_shift if max_shift is not None else getattr(settings, "WEYL_LAB_MAX_SHIFT", 10.0))
    if z.norm() > max_shift:
        raise TailGuard(f"|z| = {z.norm():.3g} excede el máximo {max_shift:g}")

    entries = expm(1j * weyl_generator(z, N, d, k))
    return FockMatrix(entries, N, d, k, Method.EXPONENTIAL, {"z": list(z.coords)})


def unitarity_deviation(W: FockMatrix) -> float:
    a = W.entries
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))

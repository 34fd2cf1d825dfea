# bargmann/oracles.py
"""Oráculos lentos del módulo de Bargmann (cuadraturas cartesianas directas)."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from fock.oracles import OracleResult
from symbols.expr import PhasePoint, SymbolExpr

from .heat import heat_time, heat_transform
from .toeplitz import coherent_amplitudes, coherent_state, toeplitz_matrix


def coherent_overlap(z, n: int = 0, N: int = 64) -> OracleResult:
    """<e_n, W_{-z} e_0> por exponencial de matriz frente a e^{-|w|^2/2} w^n/√n!."""
    z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
    oracle = coherent_amplitudes(z, n)[n]
    fast = coherent_state(z, N)[n]
    return OracleResult("coherent-overlap", oracle, fast, {"z": list(z.coords), "n": n, "N": N})


def _bargmann_on_grid(x: np.ndarray, xi: np.ndarray, n: int) -> np.ndarray:
    w = (x + 1j * xi) / math.sqrt(2.0)
    log_mod = -0.5 * np.abs(w) ** 2 - 0.5 * gammaln(n + 1)
    if n:
        with np.errstate(divide="ignore"):
            log_mod = log_mod + n * np.log(np.abs(w))
    return np.exp(log_mod) * np.exp(1j * n * np.angle(w))


def toeplitz_coherent(f: SymbolExpr, m: int = 0, n: int = 0, N: int = 32, points: int = 401) -> OracleResult:
    """∫ f(z) <e_m|z><z|e_n> dx dξ / 2π por trapecios en una caja cartesiana."""
    L = max(8.0, 2.0 * math.sqrt(2.0 * max(m, n) + 1.0)) + 4.0
    axis = np.linspace(-L, L, points)
    X, XI = np.meshgrid(axis, axis, indexing="ij")
    values = f.evaluate_grid(np.stack([X, XI], axis=-1))
    integrand = values * _bargmann_on_grid(X, XI, m) * np.conj(_bargmann_on_grid(X, XI, n))
    oracle = np.trapezoid(np.trapezoid(integrand, axis, axis=1), axis) / (2.0 * math.pi)
    fast = toeplitz_matrix(f, N).entries[m, n]
    return OracleResult("toeplitz-coherent", oracle, fast, {"symbol": f.to_text(), "m": m, "n": n, "N": N})


def heat_moment(f: SymbolExpr, z, t: float | None = None, points: int = 401) -> OracleResult:
    """Convolución directa (π t)^{-d} ∫ f(z - u) e^{-|u|^2/t} du frente a heat_transform (d = 1)."""
    z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
    t = heat_time(t)
    half = 10.0 * math.sqrt(t)
    axis = np.linspace(-half, half, points)
    U, V = np.meshgrid(axis, axis, indexing="ij")
    kernel = np.exp(-(U**2 + V**2) / t) / (math.pi * t)
    values = f.evaluate_grid(np.stack([z.x[0] - U, z.xi[0] - V], axis=-1))
    oracle = np.trapezoid(np.trapezoid(kernel * values, axis, axis=1), axis)
    fast = heat_transform(f, t).evaluate(z)
    return OracleResult("heat-moment", oracle, fast, {"symbol": f.to_text(), "z": list(z.coords), "t": t})

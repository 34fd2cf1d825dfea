# fock/hermite.py
"""
Funciones de Hermite L²-ortonormales

    phi_n(y) = (2^n n! sqrt(pi))^{-1/2} H_n(y) exp(-y^2/2)

por la recurrencia normalizada

    phi_{n+1} = sqrt(2/(n+1)) y phi_n - sqrt(n/(n+1)) phi_{n-1}.

El factor gaussiano se lleva en escala logarítmica y se reescala la mantisa
cuando crece, así no hay underflow en |y| grande ni overflow en n grande.
"""
from __future__ import annotations

import numpy as np

MAX_ORDER = 2000
_RESCALE = 1e100
_LOG_PI_QUARTER = 0.25 * np.log(np.pi)


def hermite_functions(n_max: int, y) -> np.ndarray:
    """phi_0..phi_{n_max} evaluadas en y; forma (n_max + 1, *y.shape)."""
    if n_max < 0 or n_max > MAX_ORDER:
        raise ValueError(f"orden de Hermite fuera de rango: {n_max} (máximo {MAX_ORDER})")
    y = np.asarray(y, dtype=float)
    out = np.empty((n_max + 1,) + y.shape, dtype=float)

    log_scale = -0.5 * y * y - _LOG_PI_QUARTER
    prev = np.zeros_like(y)
    cur = np.ones_like(y)
    out[0] = np.exp(log_scale)

    for n in range(n_max):
        nxt = np.sqrt(2.0 / (n + 1)) * y * cur - np.sqrt(n / (n + 1.0)) * prev
        prev, cur = cur, nxt

        big = np.abs(cur) > _RESCALE
        if np.any(big):
            cur = np.where(big, cur / _RESCALE, cur)
            prev = np.where(big, prev / _RESCALE, prev)
            log_scale = np.where(big, log_scale + np.log(_RESCALE), log_scale)

        with np.errstate(over="ignore", under="ignore"):
            out[n + 1] = cur * np.exp(log_scale)
    return out


def hermite_eval(n: int, y) -> float | np.ndarray:
    values = hermite_functions(int(n), y)[int(n)]
    return float(values) if values.ndim == 0 else values


def hermite_derivatives(n_max: int, y) -> np.ndarray:
    """phi_n' = sqrt(n/2) phi_{n-1} - sqrt((n+1)/2) phi_{n+1}."""
    phi = hermite_functions(n_max + 1, y)
    out = np.empty((n_max + 1,) + np.shape(y), dtype=float)
    for n in range(n_max + 1):
        lower = np.sqrt(n / 2.0) * phi[n - 1] if n else 0.0
        out[n] = lower - np.sqrt((n + 1) / 2.0) * phi[n + 1]
    return out


def gauss_hermite_physical(order: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Nodos y pesos para integrales ∫ g(y) dy con g ~ producto de funciones de
    Hermite: devuelve pesos ya multiplicados por exp(y^2).
    """
    nodes, weights = np.polynomial.hermite.hermgauss(int(order))
    return nodes, weights * np.exp(nodes * nodes)

# fock/ladder.py
from __future__ import annotations

from functools import lru_cache

import numpy as np

from common.choices import Method
from common.exceptions import DimensionMismatch

from .matrices import FockMatrix, lift


@lru_cache(maxsize=32)
def _annihilation(N: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1)
    a.flags.writeable = False
    return a


def annihilation(N: int) -> np.ndarray:
    """a e_n = sqrt(n) e_{n-1}."""
    return _annihilation(int(N)).copy()


def position(N: int) -> np.ndarray:
    """Q = (a + a^*)/sqrt(2), tridiagonal real."""
    a = _annihilation(int(N))
    return ((a + a.T) / np.sqrt(2.0)).astype(complex)


def momentum(N: int) -> np.ndarray:
    """P = -i (a - a^*)/sqrt(2); <phi_0, P phi_1> = -i/sqrt(2)."""
    a = _annihilation(int(N))
    return -1j * (a - a.T) / np.sqrt(2.0)


def number(N: int) -> np.ndarray:
    return np.diag(np.arange(N, dtype=float)).astype(complex)


def ladder_matrices(N: int, d: int = 1, k: int = 1) -> tuple[list[FockMatrix], list[FockMatrix]]:
    """(Q_1..Q_d, P_1..P_d) con relleno de identidad en los otros modos."""
    if N < 2:
        raise DimensionMismatch(f"N debe ser >= 2 (recibido {N})")
    q, p = position(N), momentum(N)
    meta = {"source": "ladder"}
    Qs = [FockMatrix(lift(q, j, d, k), N, d, k, Method.MONOMIAL, meta) for j in range(d)]
    Ps = [FockMatrix(lift(p, j, d, k), N, d, k, Method.MONOMIAL, meta) for j in range(d)]
    return Qs, Ps

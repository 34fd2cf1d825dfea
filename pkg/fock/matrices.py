# fock/matrices.py
"""
FockMatrix: operador truncado en la base de Hermite/Fock.

Orden de la base: multi-índice de Fock (n_1..n_d) lexicográfico, índice de
coeficiente (0..k-1) el más rápido:

    fila = rango(n_1..n_d) * k + c,   rango = sum_j n_j N^{d-1-j}
"""
from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np

from common.choices import Method
from common.exceptions import DimensionMismatch, InvalidConfig
from common.utils import complex_pair, dumps_stable

logger = logging.getLogger(__name__)

METHOD_CODES = {
    Method.MONOMIAL: 1,
    Method.KERNEL_QUADRATURE: 2,
    Method.EXPONENTIAL: 3,
    Method.COMMUTATOR: 4,
    Method.TOEPLITZ: 5,
    Method.TOEPLITZ_SYMBOL: 6,
}
METHODS_BY_CODE = {v: k for k, v in METHOD_CODES.items()}

MAGIC = b"WEYL0001"
# magic (8) + N, d, k, método (4 x u32) + reservado (8) = 32 bytes
HEADER = struct.Struct("<8s4I8s")


@dataclass(frozen=True, eq=False)
class FockMatrix:
    entries: np.ndarray
    N: int
    d: int = 1
    k: int = 1
    method: str = Method.MONOMIAL
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        side = self.N**self.d * self.k
        if a.shape != (side, side):
            raise DimensionMismatch(f"se esperaba una matriz {side}x{side} (N={self.N}, d={self.d}, k={self.k}), llegó {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "method", Method(self.method))

    # -- propiedades ------------------------------------------------------------
    @property
    def side(self) -> int:
        return self.entries.shape[0]

    def hermitian_deviation(self) -> float:
        """max_ij |A_ij - conj(A_ji)|."""
        a = self.entries
        return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0

    def is_hermitian(self, tolerance: float = 1e-10) -> bool:
        return self.hermitian_deviation() <= tolerance

    def restrict(self, M: int) -> np.ndarray:
        idx = trusted_indices(self.N, self.d, self.k, M)
        return self.entries[np.ix_(idx, idx)]

    def with_entries(self, entries, method=None, **metadata) -> "FockMatrix":
        meta = {**self.metadata, **metadata}
        return FockMatrix(entries, self.N, self.d, self.k, method or self.method, meta)

    # -- aritmética -----------------------------------------------------------
    def _other(self, other) -> np.ndarray:
        if isinstance(other, FockMatrix):
            if (other.N, other.d, other.k) != (self.N, self.d, self.k):
                raise DimensionMismatch("matrices de bases distintas")
            return other.entries
        return np.asarray(other)

    def __add__(self, other):
        return self.with_entries(self.entries + self._other(other))

    def __sub__(self, other):
        return self.with_entries(self.entries - self._other(other))

    def __matmul__(self, other):
        return self.with_entries(self.entries @ self._other(other))

    def __mul__(self, scalar):
        return self.with_entries(self.entries * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_entries(-self.entries)

    # -- serialización --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "k": self.k,
            "method": str(self.method),
            "entries": [complex_pair(v) for v in self.entries.ravel()],
            "provenance": self.metadata,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FockMatrix":
        try:
            N, d, k = int(payload["N"]), int(payload["d"]), int(payload["k"])
            side = N**d * k
            flat = np.array([complex(re, im) for re, im in payload["entries"]], dtype=complex)
            return cls(flat.reshape(side, side), N, d, k, payload["method"], dict(payload.get("provenance") or {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(f"JSON de FockMatrix inválido: {exc}") from exc

    def to_json(self) -> str:
        return dumps_stable(self.to_dict())

    def to_bytes(self) -> bytes:
        return pack_binary(self.entries, self.N, self.d, self.k, METHOD_CODES[self.method])

    @classmethod
    def from_bytes(cls, blob: bytes) -> "FockMatrix":
        N, d, k, code, values = unpack_binary(blob)
        side = N**d * k
        if values.size != side * side:
            raise InvalidConfig(f"tamaño de datos {values.size} no coincide con {side}x{side}")
        return cls(values.reshape(side, side), N, d, k, METHODS_BY_CODE[code])

    def save(self, path, fmt: str = "json") -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            path.write_text(self.to_json(), encoding="utf-8")
        elif fmt == "binary":
            path.write_bytes(self.to_bytes())
        else:
            raise InvalidConfig(f"formato desconocido: {fmt!r}")
        return path

    @classmethod
    def load(cls, path) -> "FockMatrix":
        path = Path(path)
        blob = path.read_bytes()
        if blob[:8] == MAGIC:
            return cls.from_bytes(blob)
        return cls.from_dict(json.loads(blob.decode("utf-8")))


# -----------------------------------------------------------------------------
# Formato binario (compartido con SampledSymbol)
# -----------------------------------------------------------------------------
def pack_binary(values: np.ndarray, N: int, d: int, k: int, code: int) -> bytes:
    header = HEADER.pack(MAGIC, int(N), int(d), int(k), int(code), b"\x00" * 8)
    data = np.ascontiguousarray(np.asarray(values, dtype="<c16")).tobytes()
    return header + data


def unpack_binary(blob: bytes) -> tuple[int, int, int, int, np.ndarray]:
    if len(blob) < HEADER.size:
        raise InvalidConfig("archivo binario truncado")
    magic, N, d, k, code, reserved = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise InvalidConfig(f"magic inválido: {magic!r}")
    if code not in METHODS_BY_CODE:
        raise InvalidConfig(f"código de método desconocido: {code}")
    values = np.frombuffer(blob, dtype="<c16", offset=HEADER.size).astype(complex)
    return N, d, k, code, values


# -----------------------------------------------------------------------------
# Estructura tensorial
# -----------------------------------------------------------------------------
def lift(mode_matrix: np.ndarray, j: int, d: int, k: int = 1) -> np.ndarray:
    """A actuando en el modo j (0-based), identidad en los demás modos y en C^k."""
    n = mode_matrix.shape[0]
    factors = [mode_matrix if i == j else np.eye(n) for i in range(d)]
    factors.append(np.eye(k))
    return reduce(np.kron, factors)


def tensor(mode_matrices, k: int = 1) -> np.ndarray:
    """A_1 ⊗ ... ⊗ A_d ⊗ I_k."""
    return reduce(np.kron, list(mode_matrices) + [np.eye(k)])


def trusted_indices(N: int, d: int, k: int, M: int) -> np.ndarray:
    """Índices de base con todos los n_j < M (bloque de confianza)."""
    if M > N:
        raise DimensionMismatch(f"M={M} excede N={N}")
    grids = np.meshgrid(*[np.arange(M)] * d, indexing="ij")
    ranks = np.zeros(grids[0].shape, dtype=int) if d else np.zeros(1, dtype=int)
    for j, g in enumerate(grids):
        ranks = ranks + g * N ** (d - 1 - j)
    ranks = np.sort(ranks.ravel())
    return (ranks[:, None] * k + np.arange(k)[None, :]).ravel()


def operator_norm(M: FockMatrix | np.ndarray) -> float:
    """
    Mayor valor singular. Es una cota INFERIOR de la norma de la forma
    del símbolo: truncar solo puede achicarla.
    """
    a = M.entries if isinstance(M, FockMatrix) else np.asarray(M)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, ord=2))

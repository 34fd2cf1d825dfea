# fock/quantize.py
"""
Cuantización de Weyl en la base de Fock truncada.

Dos caminos independientes:

  MONOMIAL           simetrización exacta de Q^a P^b por modo (polinomios)
  KERNEL_QUADRATURE  núcleo de Schwartz K(x,y) = (2π)^{-1} ∫ e^{i(x-y)ξ} f((x+y)/2, ξ) dξ
                     por transformada parcial en ξ (FFT) y cuadratura doble
                     contra las funciones de Hermite (d = 1 o 2, producto tensorial por modo)

Convenciones: op(1) = I, op(x_j) = Q_j, op(ξ_j) = P_j.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, replace
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np
import sympy
from django.conf import settings

from common.choices import Method, QuantizeMethod
from common.exceptions import CostGuard, DimensionMismatch, GridTooCoarse, MethodMismatch, UnsupportedDimension
from common.parallel import ordered_map
from symbols.expr import MatrixSymbol, SymbolExpr

from .hermite import hermite_functions
from .ladder import momentum, position
from .matrices import FockMatrix

logger = logging.getLogger(__name__)


# -----------------------------------------------------------------------------
# Configuración de cuadratura
# -----------------------------------------------------------------------------
MAX_KERNEL_DIMENSION = 2


def default_half_width(N: int) -> float:
    """El soporte esencial de phi_n escala como sqrt(2n)."""
    return max(8.0, 2.0 * math.sqrt(2.0 * N))


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


@dataclass(frozen=True)
class QuadratureConfig:
    """
    Malla del método de núcleo. Los elementos de matriz se integran con la
    regla del trapecio sobre la red uniforme x_i = i h, h = π/R_ξ: espectralmente
    exacta para productos de funciones de Hermite con banda dentro de |ξ| < R_ξ.

    xi_points fija los nodos en ξ para d = 1; con d = 2 cada eje ξ usa la menor
    potencia de dos sin aliasing (>= 2 n_x) por xi_oversample.
    """

    R_x: float
    R_xi: float
    xi_points: int = 1024
    xi_oversample: int = 1
    refine: bool = True
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.R_x <= 0 or self.R_xi <= 0:
            raise ValueError("las semianchuras deben ser positivas")
        if self.xi_points < 64 or self.xi_points & (self.xi_points - 1):
            raise ValueError(f"xi_points debe ser potencia de dos >= 64 (recibido {self.xi_points})")
        if self.xi_oversample < 1 or self.xi_oversample & (self.xi_oversample - 1):
            raise ValueError(f"xi_oversample debe ser potencia de dos >= 1 (recibido {self.xi_oversample})")

    @classmethod
    def default_for(cls, N: int, **overrides) -> "QuadratureConfig":
        R = default_half_width(N)
        base = dict(
            R_x=R,
            R_xi=R,
            xi_points=int(getattr(settings, "WEYL_LAB_XI_POINTS", 1024)),
            refine=bool(getattr(settings, "WEYL_LAB_KERNEL_REFINE", True)),
            tolerance=float(getattr(settings, "WEYL_LAB_GRID_TOLERANCE", 1e-8)),
        )
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    @property
    def spacing(self) -> float:
        return math.pi / self.R_xi

    def for_size(self, N: int) -> "QuadratureConfig":
        """Misma configuración con la caja ensanchada al soporte de N niveles."""
        R = default_half_width(N)
        return replace(self, R_x=max(self.R_x, R), R_xi=max(self.R_xi, R))

    def refined(self, d: int = 1) -> "QuadratureConfig":
        """
        d = 1: paso en x a la mitad (banda en ξ al doble, misma resolución en ξ).
        d = 2: nodos en ξ al doble por eje, misma red en x.
        """
        if d == 1:
            return replace(self, R_xi=2 * self.R_xi, xi_points=2 * self.xi_points, refine=False)
        return replace(self, xi_oversample=2 * self.xi_oversample, refine=False)

    def as_dict(self) -> dict:
        return asdict(self)


# -----------------------------------------------------------------------------
# Monomios
# -----------------------------------------------------------------------------
@lru_cache(maxsize=256)
def _mode_monomial(a: int, b: int, N: int) -> np.ndarray:
    """
    op(x^a ξ^b) = 2^{-a} Σ_k C(a,k) Q^k P^b Q^{a-k}, calculado en una base
    de N + a + b niveles y recortado: los elementos m, n < N son exactos.
    """
    size = N + a + b
    q, p = position(size), momentum(size)
    pb = np.linalg.matrix_power(p, b)
    qpow = [np.eye(size, dtype=complex)]
    for _ in range(a):
        qpow.append(qpow[-1] @ q)
    acc = np.zeros((size, size), dtype=complex)
    for k in range(a + 1):
        acc += math.comb(a, k) * (qpow[k] @ pb @ qpow[a - k])
    out = (acc / 2.0**a)[:N, :N].copy()
    out.flags.writeable = False
    return out


def quantize_monomial(a: Sequence[int], b: Sequence[int], N: int, d: int | None = None, k: int = 1) -> FockMatrix:
    a, b = tuple(int(v) for v in a), tuple(int(v) for v in b)
    d = d or len(a)
    if len(a) != d or len(b) != d:
        raise DimensionMismatch(f"exponentes de largo {len(a)}/{len(b)} para d={d}")
    degree = sum(a) + sum(b)
    max_degree = int(getattr(settings, "WEYL_LAB_MAX_DEGREE", 12))
    if degree > max_degree:
        raise CostGuard(f"grado {degree} excede el máximo permitido {max_degree}")

    modes = [_mode_monomial(a[j], b[j], N) for j in range(d)]
    entries = reduce(np.kron, modes + [np.eye(k)])
    return FockMatrix(entries, N, d, k, Method.MONOMIAL, {"a": list(a), "b": list(b)})


def _polynomial_terms(f: SymbolExpr) -> list[tuple[tuple[int, ...], complex]]:
    poly = sympy.Poly(f.expr, *f.variables)
    return [(monom, complex(sympy.N(coeff))) for monom, coeff in poly.terms()]


def _quantize_polynomial(f: SymbolExpr, N: int) -> np.ndarray:
    d = f.d
    side = N**d
    out = np.zeros((side, side), dtype=complex)
    max_degree = int(getattr(settings, "WEYL_LAB_MAX_DEGREE", 12))
    for monom, coeff in _polynomial_terms(f):
        if coeff == 0:
            continue
        if sum(monom) > max_degree:
            raise CostGuard(f"grado {sum(monom)} excede el máximo permitido {max_degree}")
        modes = [_mode_monomial(monom[j], monom[d + j], N) for j in range(d)]
        out += coeff * reduce(np.kron, modes)
    return out


# -----------------------------------------------------------------------------
# Núcleo de Schwartz
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class _KernelGrid:
    h: float
    x: np.ndarray
    xi: np.ndarray
    n_xi: int

    @classmethod
    def build(cls, cfg: QuadratureConfig, d: int = 1) -> "_KernelGrid":
        h = cfg.spacing
        half = int(math.ceil(cfg.R_x / h))
        x = h * np.arange(-half, half + 1, dtype=float)
        if d == 1:
            n_xi = max(cfg.xi_points, _next_pow2(2 * x.size))
        else:
            n_xi = _next_pow2(2 * x.size) * cfg.xi_oversample
        d_xi = 2.0 * math.pi / (n_xi * h)
        # nodos de punto medio: simétricos respecto de 0
        xi = -math.pi / h + (np.arange(n_xi) + 0.5) * d_xi
        return cls(h, x, xi, n_xi)

    @property
    def d_xi(self) -> float:
        return 2.0 * math.pi / (self.n_xi * self.h)

    @property
    def midpoints(self) -> np.ndarray:
        """s_p = x_0 + p h/2, p = i + j."""
        return 0.5 * self.h * (np.arange(2 * self.x.size - 1) - (self.x.size - 1))

    @property
    def phase(self) -> np.ndarray:
        """e^{i l h ξ_k} = (-1)^l e^{iπ l/n} e^{2πi l k/n}, l centrado en (-n/2, n/2]."""
        n = self.n_xi
        ell = np.arange(n)
        ell = np.where(ell < n // 2, ell, ell - n)
        return np.where(ell % 2, -1.0, 1.0) * np.exp(1j * np.pi * ell / n)

    @property
    def scale(self) -> float:
        return self.d_xi / (2.0 * math.pi) * self.n_xi

    def index_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """(i + j, (i - j) mod n) para todos los pares de nodos."""
        nx = self.x.size
        i, j = np.meshgrid(np.arange(nx), np.arange(nx), indexing="ij")
        return i + j, (i - j) % self.n_xi

    def evaluations(self, d: int) -> int:
        return (self.midpoints.size * self.n_xi) ** d


def _partial_fourier(f: SymbolExpr | MatrixSymbol, grid: _KernelGrid) -> np.ndarray:
    """
    F[p, l] ≈ (2π)^{-1} ∫ e^{i l h ξ} f(s_p, ξ) dξ, l tomado módulo n_xi.
    Forma (P, n_xi) o (P, n_xi, k, k).
    """
    s = grid.midpoints
    n = grid.n_xi
    phase, scale = grid.phase, grid.scale

    rows_per_block = max(1, int(getattr(settings, "WEYL_LAB_CHUNK_POINTS", 250_000)) // n)
    blocks = [slice(i, min(i + rows_per_block, s.size)) for i in range(0, s.size, rows_per_block)]

    def _block(sl: slice) -> np.ndarray:
        pts = np.empty((sl.stop - sl.start, n, 2))
        pts[..., 0] = s[sl, None]
        pts[..., 1] = grid.xi[None, :]
        values = f.evaluate_grid(pts)
        spectrum = np.fft.ifft(values, axis=1)
        if spectrum.ndim == 4:
            return scale * spectrum * phase[None, :, None, None]
        return scale * spectrum * phase[None, :]

    return np.concatenate(ordered_map(_block, blocks), axis=0)


def _kernel_elements(f: SymbolExpr | MatrixSymbol, N: int, cfg: QuadratureConfig) -> np.ndarray:
    grid = _KernelGrid.build(cfg)
    F = _partial_fourier(f, grid)
    phi = hermite_functions(N - 1, grid.x)  # (N, nx)
    p_idx, l_idx = grid.index_pairs()
    h2 = grid.h**2

    if F.ndim == 4:
        k = F.shape[-1]
        out = np.zeros((N * k, N * k), dtype=complex)
        for a in range(k):
            for b in range(k):
                K = F[p_idx, l_idx, a, b]
                out[a::k, b::k] = h2 * (phi @ K @ phi.T)
        return out

    K = F[p_idx, l_idx]
    return h2 * (phi @ K @ phi.T)


def _two_mode_slab(f, grid: _KernelGrid, phi: np.ndarray, p1: int) -> np.ndarray:
    """
    Aporte de los pares (i1, j1) con i1 + j1 = p1, forma (N, N, N, N, k, k)
    indexada [m1, n1, m2, n2, a, b].
    """
    s, xi = grid.midpoints, grid.xi
    nx, n = grid.x.size, grid.n_xi
    P = s.size

    pts = np.empty((P, n, n, 4))
    pts[..., 0] = s[p1]
    pts[..., 1] = s[:, None, None]
    pts[..., 2] = xi[None, :, None]
    pts[..., 3] = xi[None, None, :]
    values = f.evaluate_grid(pts)
    if values.ndim == 3:
        values = values[..., None, None]

    phase = grid.phase
    F = np.fft.ifft2(values, axes=(1, 2)) * grid.scale**2
    F *= phase[None, :, None, None, None] * phase[None, None, :, None, None]

    i1 = np.arange(max(0, p1 - nx + 1), min(p1, nx - 1) + 1)
    j1 = p1 - i1
    l1 = (i1 - j1) % n
    p2, l2 = grid.index_pairs()
    # K[t, i2, j2, a, b] = F[p2, l1_t, l2]
    K = F[p2[None], l1[:, None, None], l2[None]]
    inner = np.einsum("mi,tijab,nj->tmnab", phi, K, phi, optimize=True)
    return np.einsum("mt,nt,tuvab->mnuvab", phi[:, i1], phi[:, j1], inner, optimize=True)


def _two_mode_kernel_elements(f: SymbolExpr | MatrixSymbol, N: int, cfg: QuadratureConfig) -> np.ndarray:
    """
    d = 2: transformada parcial en (ξ_1, ξ_2) por FFT 2-D en cada punto medio
    (s_p1, s_p2) y cuadratura contra productos phi_m1(x1) phi_m2(x2).
    """
    grid = _KernelGrid.build(cfg, d=2)
    budget = int(getattr(settings, "WEYL_LAB_KERNEL_MAX_POINTS", 500_000_000))
    if grid.evaluations(2) > budget:
        raise CostGuard(f"la malla de núcleo 2-D requiere {grid.evaluations(2)} evaluaciones (máximo {budget})")

    phi = hermite_functions(N - 1, grid.x)
    slabs = ordered_map(lambda p1: _two_mode_slab(f, grid, phi, p1), range(grid.midpoints.size))
    total = reduce(np.add, slabs) * grid.h**4

    k = total.shape[-1]
    # [m1, n1, m2, n2, a, b] -> fila (m1 N + m2) k + a, columna (n1 N + n2) k + b
    return total.transpose(0, 2, 4, 1, 3, 5).reshape(N * N * k, N * N * k)


def _elements(f, N: int, cfg: QuadratureConfig) -> np.ndarray:
    if f.d == 1:
        return _kernel_elements(f, N, cfg)
    return _two_mode_kernel_elements(f, N, cfg)


def quantize_kernel(f: SymbolExpr | MatrixSymbol, N: int, cfg: QuadratureConfig | None = None) -> FockMatrix:
    if f.d > MAX_KERNEL_DIMENSION:
        raise UnsupportedDimension(f"la cuadratura de núcleo admite d <= {MAX_KERNEL_DIMENSION} (d={f.d})")
    cfg = cfg or QuadratureConfig.default_for(N)
    entries = _elements(f, N, cfg)
    meta = {"quadrature": cfg.as_dict()}

    if cfg.refine:
        fine = _elements(f, N, cfg.refined(f.d))
        change = float(np.max(np.abs(fine - entries)))
        meta["refinement_change"] = change
        logger.info("quantize_kernel N=%d d=%d: cambio bajo refinamiento %.3e", N, f.d, change)
        if change > cfg.tolerance * max(1.0, float(np.max(np.abs(entries)))):
            raise GridTooCoarse(
                f"duplicar la malla cambió los elementos en {change:.3e} (tolerancia {cfg.tolerance:.1e})",
                change,
            )

    return FockMatrix(entries, N, f.d, getattr(f, "k", 1), Method.KERNEL_QUADRATURE, meta)


# -----------------------------------------------------------------------------
# Despacho
# -----------------------------------------------------------------------------
def _interleave(blocks: list[list[np.ndarray]]) -> np.ndarray:
    k = len(blocks)
    side = blocks[0][0].shape[0]
    out = np.zeros((side * k, side * k), dtype=complex)
    for a in range(k):
        for b in range(k):
            out[a::k, b::k] = blocks[a][b]
    return out


def quantize(
    f: SymbolExpr | MatrixSymbol,
    N: int,
    method: str = QuantizeMethod.AUTO,
    cfg: QuadratureConfig | None = None,
) -> FockMatrix:
    method = QuantizeMethod(str(method).upper())
    if method == QuantizeMethod.AUTO:
        method = QuantizeMethod.MONOMIAL if f.is_polynomial() else QuantizeMethod.KERNEL

    if method == QuantizeMethod.KERNEL:
        return quantize_kernel(f, N, cfg)

    if not f.is_polynomial():
        raise MethodMismatch("el método MONOMIAL requiere un símbolo polinomial")

    if isinstance(f, MatrixSymbol):
        entries = _interleave([[_quantize_polynomial(e, N) for e in row] for row in f.entries])
        return FockMatrix(entries, N, f.d, f.k, Method.MONOMIAL, {"symbol": f.to_text()})
    return FockMatrix(_quantize_polynomial(f, N), N, f.d, 1, Method.MONOMIAL, {"symbol": f.to_text()})

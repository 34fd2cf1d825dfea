# bargmann/toeplitz.py
"""
Estados coherentes y operadores de Toeplitz sobre la base de Fock truncada.

Identificación por modo w = (x + iξ)/√2, de modo que |w|^2 = (x^2 + ξ^2)/2.

    T_f = ∫ f(z) |z><z| dx dξ / 2π,   <e_m|z> = e^{-|w|^2/2} w^m / √m!

Cuadratura polar por modo: u = |w|^2 con Gauss-Laguerre, ángulo uniforme
resuelto con FFT; con d = 2, producto de dos mallas polares.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from django.conf import settings
from scipy.special import gammaln, roots_laguerre

from common.choices import Method, QuantizeMethod
from common.exceptions import CostGuard, DimensionMismatch, QuadratureUnconverged, TailGuard, Unconverged, UnsupportedDimension
from common.parallel import ordered_map
from fock.matrices import FockMatrix
from fock.quantize import QuadratureConfig, quantize
from fock.weyl import weyl_operator
from symbols.expr import MatrixSymbol, PhasePoint, SymbolExpr
from symbols.parser import parse

from .heat import heat_time, heat_transform

logger = logging.getLogger(__name__)

TAIL_FACTOR = 0.8
CALIBRATION_TIMES = (0.5, 0.75, 1.0, 1.25, 1.5)


# -----------------------------------------------------------------------------
# Estados coherentes
# -----------------------------------------------------------------------------
def coherent_state(z, N: int) -> np.ndarray:
    """Estado centrado en z: W_{-z} e_0 (= desplazamiento D(w))."""
    z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
    limit = TAIL_FACTOR * math.sqrt(2.0 * N)
    if z.norm() > limit:
        raise TailGuard(f"|z| = {z.norm():.3g} excede {limit:.3g} para N={N}")
    W = weyl_operator(-z, N, z.d, max_shift=limit).entries
    return W[:, 0].copy()


def coherent_amplitudes(z, n_max: int) -> np.ndarray:
    """Forma cerrada e^{-|w|^2/2} w^n/√n!, n = 0..n_max (un modo)."""
    z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
    w = complex(z.x[0], z.xi[0]) / math.sqrt(2.0)
    n = np.arange(n_max + 1)
    if w == 0:
        return (n == 0).astype(complex)
    log_mod = -0.5 * abs(w) ** 2 + n * math.log(abs(w)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mod) * np.exp(1j * n * np.angle(w))


# -----------------------------------------------------------------------------
# Matrices de Toeplitz
# -----------------------------------------------------------------------------
MAX_TOEPLITZ_DIMENSION = 2


@dataclass(frozen=True)
class PolarGrid:
    """Malla polar por modo; con d = 2 se usa el producto de dos mallas iguales."""

    radial: int
    angular: int

    @classmethod
    def default_for(cls, N: int, d: int = 1) -> "PolarGrid":
        if d == 1:
            return cls(2 * N + 64, max(64, 4 * N))
        return cls(N + 24, max(32, 4 * N))

    def doubled(self) -> "PolarGrid":
        return PolarGrid(2 * self.radial, 2 * self.angular)

    def evaluations(self, d: int) -> int:
        return (self.radial * self.angular) ** d


def _angular_spectrum(f, u: np.ndarray, n_theta: int) -> np.ndarray:
    """A[k, l] = (1/n_θ) Σ_j e^{i l θ_j} f(√(2u_k) cos θ_j, √(2u_k) sin θ_j)."""
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    rows = max(1, int(getattr(settings, "WEYL_LAB_CHUNK_POINTS", 250_000)) // n_theta)
    blocks = [slice(i, min(i + rows, u.size)) for i in range(0, u.size, rows)]

    def _block(sl: slice) -> np.ndarray:
        r = np.sqrt(2.0 * u[sl])[:, None]
        pts = np.stack(np.broadcast_arrays(r * np.cos(theta), r * np.sin(theta)), axis=-1)
        return np.fft.ifft(f.evaluate_grid(pts), axis=1)

    return np.concatenate(ordered_map(_block, blocks), axis=0)


def _radial_weights(u: np.ndarray, w: np.ndarray, N: int) -> np.ndarray:
    """w_k u_k^{(m+n)/2} / √(m! n!), forma (radial, N, N)."""
    m = np.arange(N)
    with np.errstate(divide="ignore"):
        log_w = np.log(w)
    half = 0.5 * (m[:, None] + m[None, :])
    norm = 0.5 * (gammaln(m + 1)[:, None] + gammaln(m + 1)[None, :])
    return np.exp(log_w[:, None, None] + half[None] * np.log(u)[:, None, None] - norm[None])


def _toeplitz_entries(f, N: int, grid: PolarGrid) -> np.ndarray:
    u, w = roots_laguerre(grid.radial)
    A = _angular_spectrum(f, u, grid.angular)

    m = np.arange(N)
    radial = _radial_weights(u, w, N)
    l_idx = (m[:, None] - m[None, :]) % grid.angular

    if A.ndim == 4:
        k = A.shape[-1]
        out = np.zeros((N * k, N * k), dtype=complex)
        for a in range(k):
            for b in range(k):
                out[a::k, b::k] = np.einsum("kmn,kmn->mn", radial, A[:, l_idx, a, b])
        return out
    return np.einsum("kmn,kmn->mn", radial, A[:, l_idx])


def _two_mode_toeplitz_slab(f, u: np.ndarray, radial: np.ndarray, n_theta: int, k1: int) -> np.ndarray:
    """Aporte del nodo radial k1 del primer modo, forma (N, N, N, N, k, k) [m1, n1, m2, n2, a, b]."""
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    r1 = math.sqrt(2.0 * u[k1])
    r2 = np.sqrt(2.0 * u)[:, None, None]

    pts = np.empty((u.size, n_theta, n_theta, 4))
    pts[..., 0] = r1 * np.cos(theta)[None, :, None]
    pts[..., 1] = r2 * np.cos(theta)[None, None, :]
    pts[..., 2] = r1 * np.sin(theta)[None, :, None]
    pts[..., 3] = r2 * np.sin(theta)[None, None, :]
    values = f.evaluate_grid(pts)
    if values.ndim == 3:
        values = values[..., None, None]
    A = np.fft.ifft2(values, axes=(1, 2))

    N = radial.shape[-1]
    m = np.arange(N)
    l_idx = (m[:, None] - m[None, :]) % n_theta
    # B[k2, m1, n1, m2, n2] = A[k2, l(m1, n1), l(m2, n2)]
    B = A[:, l_idx[:, :, None, None], l_idx[None, None, :, :]]
    return np.einsum("mn,kuv,kmnuvab->mnuvab", radial[k1], radial, B, optimize=True)


def _two_mode_toeplitz_entries(f, N: int, grid: PolarGrid) -> np.ndarray:
    budget = int(getattr(settings, "WEYL_LAB_KERNEL_MAX_POINTS", 500_000_000))
    if grid.evaluations(2) > budget:
        raise CostGuard(f"la malla polar 2-D requiere {grid.evaluations(2)} evaluaciones (máximo {budget})")
    u, w = roots_laguerre(grid.radial)
    radial = _radial_weights(u, w, N)
    slabs = ordered_map(lambda k1: _two_mode_toeplitz_slab(f, u, radial, grid.angular, k1), range(grid.radial))
    total = reduce(np.add, slabs)
    k = total.shape[-1]
    return total.transpose(0, 2, 4, 1, 3, 5).reshape(N * N * k, N * N * k)


def _polar_entries(f, N: int, grid: PolarGrid) -> np.ndarray:
    if f.d == 1:
        return _toeplitz_entries(f, N, grid)
    return _two_mode_toeplitz_entries(f, N, grid)


def toeplitz_matrix(
    f: SymbolExpr | MatrixSymbol,
    N: int,
    grid: PolarGrid | None = None,
    verify: bool = True,
    tolerance: float = 1e-8,
) -> FockMatrix:
    if f.d > MAX_TOEPLITZ_DIMENSION:
        raise UnsupportedDimension(f"la cuadratura polar admite d <= {MAX_TOEPLITZ_DIMENSION} (d={f.d})")
    grid = grid or PolarGrid.default_for(N, f.d)
    entries = _polar_entries(f, N, grid)
    meta = {"radial": grid.radial, "angular": grid.angular, "symbol": f.to_text()}

    if verify:
        fine = _polar_entries(f, N, grid.doubled())
        change = float(np.max(np.abs(fine - entries)))
        meta["refinement_change"] = change
        logger.info("toeplitz_matrix N=%d d=%d: cambio al duplicar la malla polar %.3e", N, f.d, change)
        if change > tolerance * max(1.0, float(np.max(np.abs(entries)))):
            raise QuadratureUnconverged(f"duplicar la malla polar cambió los elementos en {change:.3e}", change)

    return FockMatrix(entries, N, f.d, getattr(f, "k", 1), Method.TOEPLITZ, meta)


# -----------------------------------------------------------------------------
# Equivalencia Toeplitz / Weyl del símbolo calentado
# -----------------------------------------------------------------------------
def heat_toeplitz_residual(
    f: SymbolExpr | MatrixSymbol,
    N: int,
    M: int,
    t: float | None = None,
    cfg: QuadratureConfig | None = None,
) -> float:
    """||P_M (T_f - op(heat(f, t))) P_M|| con op por cuadratura de núcleo."""
    if M > N // 2:
        raise DimensionMismatch(f"el bloque de confianza requiere M <= N/2 (M={M}, N={N})")
    T = toeplitz_matrix(f, N)
    W = quantize(heat_transform(f, heat_time(t)), N, QuantizeMethod.KERNEL, cfg)
    residual = float(np.linalg.norm(T.restrict(M) - W.restrict(M), 2))
    logger.info("heat_toeplitz_residual N=%d M=%d: %.3e", N, M, residual)
    return residual


@dataclass(frozen=True)
class HeatCalibration:
    t: float
    residuals: dict

    def as_dict(self) -> dict:
        return {"t": self.t, "residuals": {repr(k): v for k, v in self.residuals.items()}}


def calibrate_heat_time(N: int = 32, M: int = 16, tolerance: float = 1e-8, candidates=CALIBRATION_TIMES) -> HeatCalibration:
    """
    Recorre la familia de núcleos hasta que op(heat((x^2+ξ^2)/2, t)) coincide
    con T_{(x^2+ξ^2)/2} = N + 1 en el bloque principal.
    """
    f = parse("(x^2 + xi^2)/2", 1)
    T = toeplitz_matrix(f, N).restrict(M)
    residuals = {}
    for t in candidates:
        op = quantize(heat_transform(f, t), N, QuantizeMethod.MONOMIAL)
        residuals[t] = float(np.linalg.norm(T - op.restrict(M), 2))
        if residuals[t] <= tolerance:
            logger.info("calibrate_heat_time: t=%g (residuo %.3e)", t, residuals[t])
            return HeatCalibration(t, residuals)
    raise Unconverged(f"ningún tiempo de calor reproduce T_(|w|^2): {residuals}")

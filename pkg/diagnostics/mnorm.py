# diagnostics/mnorm.py
"""
Estimador de la norma de Sjöstrand

    ||g||_{M∞,1} = ∫ sup_z |V_φ g(z, ζ)| dζ,   φ(u) = 2^{D/4} exp(-π|u|^2),  D = 2d

con transformadas de Fourier por ventanas: para cada traslación z se toma un
parche de la malla alrededor de z, se multiplica por φ(· - z) y se aplica
FFT. El máximo sobre z es por frecuencia y luego se suma sobre ζ.

Convergencia: la estimación se repite con la caja al doble (misma malla) y
con la malla al doble (misma caja). Si crece con la caja, g no está en M∞,1.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from bargmann.heat import SampledSymbol
from common.choices import Verdict
from common.exceptions import BoxTooSmall, CostGuard, Unconverged
from common.parallel import ordered_map

logger = logging.getLogger(__name__)

WINDOW_RADIUS = 4.0
TRANSLATION_STEP = 0.5
TRANSLATIONS_PER_BLOCK = 64


@dataclass(frozen=True)
class MNormEstimate:
    value: float
    box_value: float
    grid_value: float
    R: float
    spacing: float
    tolerance: float

    @property
    def box_change(self) -> float:
        return _relative(self.box_value, self.value)

    @property
    def grid_change(self) -> float:
        return _relative(self.grid_value, self.value)

    @property
    def converged(self) -> bool:
        return self.box_change <= self.tolerance and self.grid_change <= self.tolerance

    @property
    def verdict(self) -> str:
        if self.box_change > self.tolerance:
            return Verdict.FAIL
        if self.grid_change > self.tolerance:
            return Verdict.INCONCLUSIVE
        return Verdict.PASS

    def require_converged(self) -> "MNormEstimate":
        if not self.converged:
            raise Unconverged(
                f"la estimación M∞,1 no es estable (caja: {self.box_change:.3g}, malla: {self.grid_change:.3g})"
            )
        return self

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "box_value": self.box_value,
            "grid_value": self.grid_value,
            "box_change": self.box_change,
            "grid_change": self.grid_change,
            "converged": self.converged,
            "verdict": str(self.verdict),
            "R": self.R,
            "spacing": self.spacing,
        }


def _relative(new: float, old: float) -> float:
    if old == 0.0:
        return 0.0 if new == 0.0 else math.inf
    return abs(new - old) / old


def _window(offsets: np.ndarray, dim: int) -> np.ndarray:
    mesh = np.meshgrid(*[offsets] * dim, indexing="ij")
    r2 = sum(m**2 for m in mesh)
    return 2.0 ** (dim / 4.0) * np.exp(-math.pi * r2)


def _budget(n_nodes: int, n_translations: int, m: int, dim: int) -> None:
    max_points = int(getattr(settings, "WEYL_LAB_SUP_MAX_POINTS", 10_000_000))
    max_work = int(getattr(settings, "WEYL_LAB_MNORM_MAX_WORK", 100_000_000))
    if n_nodes**dim > max_points or n_translations * m**dim > max_work:
        raise CostGuard(
            f"M∞,1 en dimensión {dim}: {n_nodes ** dim} nodos y {n_translations} traslaciones exceden el presupuesto"
        )


def _from_values(values: np.ndarray, dim: int, h: float) -> float:
    """values sobre la malla uniforme de paso h (n nodos por eje de fase)."""
    n = values.shape[0]
    half_patch = int(round(WINDOW_RADIUS / h))
    stride = max(1, int(round(TRANSLATION_STEP / h)))
    m = 2 * half_patch
    if n < m:
        raise BoxTooSmall(f"la caja de {n} nodos no contiene la ventana de {m} nodos")
    centres = np.arange(half_patch, n - half_patch + 1, stride)
    _budget(n, centres.size**dim, m, dim)

    matrix = values.ndim > dim
    window = _window(h * np.arange(-half_patch, half_patch), dim)
    if matrix:
        window = window[..., None, None]
    fft_axes = tuple(range(1, dim + 1))

    translations = list(itertools.product(centres, repeat=dim))
    blocks = [translations[i : i + TRANSLATIONS_PER_BLOCK] for i in range(0, len(translations), TRANSLATIONS_PER_BLOCK)]

    def _block(block) -> np.ndarray:
        patches = np.stack(
            [values[tuple(slice(c - half_patch, c + half_patch) for c in centre)] * window for centre in block]
        )
        spectrum = np.fft.fftn(patches, axes=fft_axes) * h**dim
        if matrix:
            # norma de Hilbert-Schmidt en C^{k×k}
            magnitude = np.sqrt(np.sum(np.abs(spectrum) ** 2, axis=(-2, -1)))
        else:
            magnitude = np.abs(spectrum)
        return np.max(magnitude, axis=0)

    sup = np.max(np.stack(ordered_map(_block, blocks)), axis=0)
    d_zeta = 1.0 / (m * h)
    return float(np.sum(sup) * d_zeta**dim)


def _estimate(g, R: float, h: float) -> float:
    dim = 2 * g.d
    if R <= WINDOW_RADIUS:
        raise BoxTooSmall(f"la caja R={R} no contiene la ventana (radio {WINDOW_RADIUS})")
    n = int(round(2 * R / h))
    _budget(n + 1, 1, 0, dim)
    axis = -R + h * np.arange(n + 1)
    mesh = np.meshgrid(*[axis] * dim, indexing="ij")
    return _from_values(g.evaluate_grid(np.stack(mesh, axis=-1)), dim, h)


def _sampled_estimate(s: SampledSymbol, tolerance: float) -> MNormEstimate:
    """Sin fórmula cerrada: caja interior de la mitad y malla de paso doble."""
    dim = 2 * s.d
    quarter = s.n // 4
    inner = s.values[tuple(slice(quarter, s.n - quarter) for _ in range(dim))]
    # la referencia es la caja interior: si el valor crece al ampliarla, no está en M∞,1
    value = _from_values(inner, dim, s.spacing)
    box_value = _from_values(s.values, dim, s.spacing)
    grid_value = _from_values(s.values[tuple(slice(quarter, s.n - quarter, 2) for _ in range(dim))], dim, 2 * s.spacing)
    return MNormEstimate(value, box_value, grid_value, s.R / 2, s.spacing, tolerance)


def m_infty_one_norm(
    g,
    R: float | None = None,
    spacing: float | None = None,
    tolerance: float | None = None,
) -> MNormEstimate:
    tolerance = float(tolerance if tolerance is not None else getattr(settings, "WEYL_LAB_MNORM_TOLERANCE", 0.05))
    if isinstance(g, SampledSymbol):
        estimate = _sampled_estimate(g, tolerance)
        logger.info("m_infty_one_norm (muestreado): %.6g", estimate.value)
        return estimate

    R = float(R or getattr(settings, "WEYL_LAB_MNORM_HALF_WIDTH", 8.0))
    h = float(spacing or getattr(settings, "WEYL_LAB_MNORM_SPACING", 0.125))
    value = _estimate(g, R, h)
    box_value = _estimate(g, 2 * R, h)
    grid_value = _estimate(g, R, h / 2)
    estimate = MNormEstimate(value, box_value, grid_value, R, h, tolerance)
    logger.info(
        "m_infty_one_norm %s: %.6g (caja %.3g, malla %.3g)",
        g.to_text(), value, estimate.box_change, estimate.grid_change,
    )
    return estimate

# symbols/scan.py
"""
Estimación de normas sup sobre cajas crecientes [-L, L]^{2d}.

La malla es uniforme por eje; el total de puntos se recorta a
WEYL_LAB_SUP_MAX_POINTS. La evaluación va por bloques de tamaño fijo y la
reducción es un máximo, así que el resultado no depende de los workers.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from django.conf import settings

from common.choices import Growth, Verdict
from common.parallel import chunk_slices, ordered_map

from .expr import MatrixSymbol, SymbolExpr

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupEstimate:
    L: tuple[float, ...]
    sups: tuple[float, ...]
    verdict: str
    points_per_axis: int = 0
    ratios: tuple[float, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "L": list(self.L),
            "sups": list(self.sups),
            "ratios": list(self.ratios),
            "verdict": str(self.verdict),
            "points_per_axis": self.points_per_axis,
        }


@dataclass(frozen=True)
class HermitianCheck:
    verdict: str
    deviation: float
    L: float
    points_per_axis: int

    def as_dict(self) -> dict:
        return {
            "verdict": str(self.verdict),
            "deviation": self.deviation,
            "L": self.L,
            "points_per_axis": self.points_per_axis,
        }


def points_per_axis(n: int, d: int, max_points: int | None = None) -> int:
    """n por eje, recortado para que n^{2d} <= max_points; siempre impar (incluye el 0)."""
    max_points = int(max_points or settings.WEYL_LAB_SUP_MAX_POINTS)
    cap = int(math.floor(max_points ** (1.0 / (2 * d)) + 1e-9))
    n_axis = max(2, min(int(n), cap))
    if n_axis % 2 == 0:
        n_axis -= 1
    return max(n_axis, 1)


def grid_reduce(
    f: SymbolExpr | MatrixSymbol,
    L: float,
    n_axis: int,
    reducer: Callable[[np.ndarray], float],
) -> float:
    """max_{bloques} reducer(f(bloque)) sobre la malla uniforme de [-L, L]^{2d}."""
    dim = 2 * f.d
    axis = np.linspace(-float(L), float(L), n_axis)
    shape = (n_axis,) * dim
    total = n_axis**dim

    def _block(s: slice) -> float:
        idx = np.unravel_index(np.arange(s.start, s.stop), shape)
        pts = axis[np.stack(idx, axis=-1)]
        return float(reducer(f.evaluate_grid(pts)))

    partials = ordered_map(_block, chunk_slices(total))
    return max(partials) if partials else 0.0


def _magnitude(values: np.ndarray) -> float:
    if values.ndim >= 3:
        return float(np.max(np.linalg.norm(values, ord=2, axis=(-2, -1))))
    return float(np.max(np.abs(values)))


def growth_verdict(sups: Sequence[float], threshold: float) -> tuple[str, tuple[float, ...]]:
    ratios = []
    for prev, cur in zip(sups, sups[1:]):
        if prev == 0.0:
            ratios.append(1.0 if cur == 0.0 else math.inf)
        else:
            ratios.append(cur / prev)
    if len(sups) < 2:
        return Growth.INCONCLUSIVE, tuple(ratios)
    if ratios[-1] > threshold:
        return Growth.GROWING, tuple(ratios)
    return Growth.BOUNDED, tuple(ratios)


def sup_scan(
    f: SymbolExpr | MatrixSymbol,
    L_schedule: Sequence[float] | None = None,
    points: int | None = None,
    threshold: float | None = None,
    max_points: int | None = None,
) -> SupEstimate:
    L_schedule = [float(v) for v in (L_schedule or settings.WEYL_LAB_L_SCHEDULE)]
    if not L_schedule:
        raise ValueError("L_schedule no puede estar vacío")
    if any(b <= a for a, b in zip(L_schedule, L_schedule[1:])):
        raise ValueError(f"L_schedule debe ser creciente: {L_schedule}")
    threshold = float(threshold if threshold is not None else settings.WEYL_LAB_GROWTH_THRESHOLD)
    n_axis = points_per_axis(points or settings.WEYL_LAB_SUP_POINTS, f.d, max_points)

    sups: list[float] = []
    running = 0.0
    for L in L_schedule:
        # la caja [-L, L] contiene a las anteriores: el máximo acumulado es la cota correcta
        running = max(running, grid_reduce(f, L, n_axis, _magnitude))
        sups.append(running)
        logger.debug("sup_scan L=%s sup=%s", L, running)

    verdict, ratios = growth_verdict(sups, threshold)
    return SupEstimate(tuple(L_schedule), tuple(sups), verdict, n_axis, ratios)


def _hermitian_deviation(values: np.ndarray) -> float:
    if values.ndim >= 3:
        diff = values - np.conj(np.swapaxes(values, -1, -2))
        return float(np.max(np.linalg.norm(diff, ord=2, axis=(-2, -1))))
    return float(np.max(np.abs(values.imag)))


def is_hermitian(
    f: SymbolExpr | MatrixSymbol,
    L: float = 10.0,
    points: int | None = None,
    tolerance: float | None = None,
) -> HermitianCheck:
    """max ||F(z) - F(z)^*|| sobre la malla; en el caso escalar, max |Im f|."""
    tolerance = float(tolerance if tolerance is not None else settings.WEYL_LAB_HERMITIAN_TOLERANCE)
    n_axis = points_per_axis(points or 21, f.d)
    deviation = grid_reduce(f, L, n_axis, _hermitian_deviation)
    verdict = Verdict.PASS if deviation <= tolerance else Verdict.FAIL
    return HermitianCheck(verdict, deviation, float(L), n_axis)

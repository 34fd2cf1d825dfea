# diagnostics/spectra.py
"""
Evidencia espectral.

bc_sensitivity: -d^2/dx^2 + V(x) = op(ξ^2 + V) en [-L, L] por diferencias
finitas de segundo orden, con condiciones de Dirichlet (nodos en la malla)
y de Neumann (nodos en los centros de celda). Los autovalores se extrapolan
por Richardson con el par de mallas n, 2n.

Si la discrepancia entre condiciones de borde persiste al crecer L, el
extremo se comporta como círculo límite: evidencia en contra de la
autoadjunción esencial en la recta.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from django.conf import settings
from scipy.linalg import eigh_tridiagonal

from common.choices import BoundaryCondition, QuantizeMethod, Verdict
from common.exceptions import DimensionMismatch, GridTooCoarse, InvalidConfig, NonFinite
from common.parallel import ordered_map
from common.utils import write_csv
from fock.quantize import QuadratureConfig, quantize
from symbols.expr import MatrixSymbol, SymbolExpr

logger = logging.getLogger(__name__)

MIN_GRID = 500
BC_COLUMNS = ("L", "bc", "level", "eigenvalue")
DECAY_FACTOR = 0.75
DISCREPANCY_LEVELS = 3


# -----------------------------------------------------------------------------
# Diferencias finitas
# -----------------------------------------------------------------------------
def _potential(V: SymbolExpr, x: np.ndarray) -> np.ndarray:
    pts = np.stack([x, np.zeros_like(x)], axis=-1)
    values = V.evaluate_grid(pts)
    if np.max(np.abs(values.imag)) > 1e-12 * max(1.0, float(np.max(np.abs(values.real)))):
        raise NonFinite(None, "el potencial debe ser real en el intervalo")
    return values.real


def fd_eigenvalues(V: SymbolExpr, L: float, n: int, bc: str, levels: int) -> np.ndarray:
    """Los `levels` autovalores más bajos con n subintervalos."""
    h = 2.0 * L / n
    if bc == BoundaryCondition.DIRICHLET:
        x = h * (np.arange(1, n) - 0.5 * n)
        diag = 2.0 / h**2 + _potential(V, x)
    else:
        x = h * (np.arange(n) + 0.5 - 0.5 * n)
        diag = 2.0 / h**2 + _potential(V, x)
        # nodo fantasma reflejado: u_{-1} = u_0
        diag[0] -= 1.0 / h**2
        diag[-1] -= 1.0 / h**2
    off = np.full(diag.size - 1, -1.0 / h**2)
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, levels - 1))


def richardson_eigenvalues(V: SymbolExpr, L: float, n: int, bc: str, levels: int, tolerance: float) -> np.ndarray:
    coarse = fd_eigenvalues(V, L, n, bc, levels)
    fine = fd_eigenvalues(V, L, 2 * n, bc, levels)
    change = np.abs(fine - coarse)
    scale = np.maximum(1.0, np.abs(fine))
    if np.any(change > tolerance * scale):
        raise GridTooCoarse(
            f"autovalores de {bc} con L={L} cambian hasta {float(np.max(change)):.3e} al duplicar la malla",
            float(np.max(change)),
        )
    return np.sort((4.0 * fine - coarse) / 3.0)


# -----------------------------------------------------------------------------
# Tabla de sensibilidad
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class BCSpectrumTable:
    potential: str
    L: tuple[float, ...]
    grid: int
    levels: int
    eigenvalues: dict = field(default_factory=dict)  # (L, bc) -> tuple de autovalores

    def discrepancy(self, L: float) -> tuple[float, ...]:
        dirichlet = np.asarray(self.eigenvalues[(L, BoundaryCondition.DIRICHLET.value)])
        neumann = np.asarray(self.eigenvalues[(L, BoundaryCondition.NEUMANN.value)])
        return tuple(float(v) for v in np.abs(dirichlet - neumann))

    @property
    def final_discrepancy(self) -> tuple[float, ...]:
        return self.discrepancy(self.L[-1])

    def low_discrepancies(self) -> list[float]:
        """max_{nivel < 3} |λ_D - λ_N| por cada L."""
        return [max(self.discrepancy(L)[:DISCREPANCY_LEVELS]) for L in self.L]

    @property
    def verdict(self) -> str:
        fail = float(getattr(settings, "WEYL_LAB_BC_FAIL_DISCREPANCY", 0.1))
        ok = float(getattr(settings, "WEYL_LAB_BC_PASS_DISCREPANCY", 1e-6))
        low = self.low_discrepancies()
        decays = low[-1] <= DECAY_FACTOR * low[0]
        if all(v > fail for v in low) and not decays:
            return Verdict.FAIL
        if low[-1] <= ok or (len(low) > 1 and decays):
            return Verdict.PASS
        return Verdict.INCONCLUSIVE

    def rows(self):
        for L in self.L:
            for bc in BoundaryCondition.values:
                for level, value in enumerate(self.eigenvalues[(L, bc)]):
                    yield (L, bc, level, value)

    def to_csv(self, path, config: dict | None = None):
        return write_csv(path, BC_COLUMNS, self.rows(), config)

    def as_dict(self) -> dict:
        return {
            "potential": self.potential,
            "L": list(self.L),
            "grid": self.grid,
            "levels": self.levels,
            "eigenvalues": [
                {"L": L, "bc": bc, "values": list(self.eigenvalues[(L, bc)])}
                for L in self.L
                for bc in BoundaryCondition.values
            ],
            "discrepancy": {repr(L): list(self.discrepancy(L)) for L in self.L},
            "verdict": str(self.verdict),
        }


def bc_sensitivity(
    V: SymbolExpr,
    L_schedule: Sequence[float] | None = None,
    grid: int | None = None,
    levels: int | None = None,
    tolerance: float | None = None,
) -> BCSpectrumTable:
    if V.d != 1:
        raise DimensionMismatch(f"el potencial debe ser de un modo (d={V.d})")
    if V.depends_on(1):
        raise InvalidConfig("el potencial solo puede depender de x")
    L_schedule = tuple(float(v) for v in (L_schedule or settings.WEYL_LAB_BC_L_SCHEDULE))
    grid = int(grid or settings.WEYL_LAB_BC_GRID)
    levels = int(levels or settings.WEYL_LAB_BC_LEVELS)
    tolerance = float(tolerance if tolerance is not None else getattr(settings, "WEYL_LAB_BC_GRID_TOLERANCE", 1e-2))
    if grid < MIN_GRID:
        raise InvalidConfig(f"la malla debe tener al menos {MIN_GRID} subintervalos (recibido {grid})")
    if levels < 1:
        raise InvalidConfig("se necesita al menos un nivel")

    jobs = [(L, bc) for L in L_schedule for bc in BoundaryCondition.values]
    results = ordered_map(lambda job: richardson_eigenvalues(V, job[0], grid, job[1], levels, tolerance), jobs)
    eigenvalues = {job: tuple(float(v) for v in values) for job, values in zip(jobs, results)}

    table = BCSpectrumTable(V.to_text(), L_schedule, grid, levels, eigenvalues)
    logger.info(
        "bc_sensitivity V=%s: discrepancias bajas %s -> %s",
        V.to_text(), [f"{v:.3g}" for v in table.low_discrepancies()], table.verdict,
    )
    return table


# -----------------------------------------------------------------------------
# Espectro de un símbolo cuantizado
# -----------------------------------------------------------------------------
def quantized_spectrum(
    f: SymbolExpr | MatrixSymbol,
    N: int,
    method: str = QuantizeMethod.AUTO,
    cfg: QuadratureConfig | None = None,
    tolerance: float | None = None,
) -> np.ndarray:
    """Autovalores de op(f) truncado; reales si la matriz es hermitiana."""
    tolerance = float(tolerance if tolerance is not None else settings.WEYL_LAB_HERMITIAN_TOLERANCE)
    A = quantize(f, N, method, cfg)
    if A.hermitian_deviation() <= tolerance:
        return np.linalg.eigvalsh(A.entries)
    logger.warning("quantized_spectrum: op(f) no es hermitiano (desviación %.3e)", A.hermitian_deviation())
    values = np.linalg.eigvals(A.entries)
    return values[np.lexsort((values.imag, values.real))]

# diagnostics/report.py
"""
Reporte agregado de diagnóstico.

Reglas:
  - cualquier sub-criterio aplicable en FAIL => FAIL
  - PASS solo si todos los sub-criterios aplicables dan PASS
  - en otro caso INCONCLUSIVE

Mismo símbolo + misma configuración => mismo JSON, byte a byte.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import sympy

from calculus.oscillation import LOWER_BOUND_CAVEAT
from common.choices import Verdict
from common.exceptions import CostGuard, WeylLabError
from common.parallel import ordered_map
from common.utils import dumps_stable
from symbols.expr import MatrixSymbol, MultiIndex, SymbolExpr, multi_indices, phase_variables

from .criteria import SubReport, aggregate, check_hermitian, check_oscillation_criterion, check_simple_criterion, cv_bound_check
from .mnorm import m_infty_one_norm
from .spectra import bc_sensitivity

logger = logging.getLogger(__name__)

SCHEMA = "weyl-lab-report/1"
NOT_A_PROOF = "INCONCLUSIVE es un resultado válido: ningún veredicto de esta herramienta es una demostración."


@dataclass(frozen=True)
class DiagnosticsReport:
    symbol: str
    d: int
    k: int
    criteria: tuple[SubReport, ...]
    config: dict = field(default_factory=dict)
    caveats: tuple[str, ...] = (LOWER_BOUND_CAVEAT, NOT_A_PROOF)

    @property
    def verdict(self) -> str:
        return aggregate(c.verdict for c in self.criteria if c.applicable)

    def criterion(self, name: str) -> SubReport:
        for c in self.criteria:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "symbol": self.symbol,
            "d": self.d,
            "k": self.k,
            "verdict": str(self.verdict),
            "criteria": {c.name: c.as_dict() for c in self.criteria},
            "caveats": list(self.caveats),
            "config": self.config,
        }

    def to_json(self) -> str:
        return dumps_stable(self.as_dict())


# -----------------------------------------------------------------------------
# Detección del patrón ξ^2 + V(x)
# -----------------------------------------------------------------------------
def schrodinger_potential(f) -> SymbolExpr | None:
    """V si f = ξ^2 + V(x) con d = 1 y f escalar; None en otro caso."""
    if isinstance(f, MatrixSymbol) or f.d != 1:
        return None
    x, xi = phase_variables(1)
    V = sympy.expand(f.expr - xi**2)
    if V.has(xi):
        return None
    return SymbolExpr(V, 1)


# -----------------------------------------------------------------------------
# Sub-criterios sobre las derivadas de orden 2
# -----------------------------------------------------------------------------
def _second_derivatives(f) -> list[MultiIndex]:
    return multi_indices(f.d, 2)


def _mnorm_report(f) -> SubReport:
    rows, reasons = [], []
    for alpha in _second_derivatives(f):
        g = f.differentiate(alpha)
        try:
            est = m_infty_one_norm(g)
        except CostGuard as exc:
            logger.info("m_infty_one omitido: %s", exc)
            return SubReport("m_infty_one", Verdict.INCONCLUSIVE, applicable=False, reasons=(str(exc),))
        except WeylLabError as exc:
            rows.append({"alpha": list(alpha.orders), "verdict": str(Verdict.INCONCLUSIVE), "error": str(exc)})
            reasons.append(f"alpha={list(alpha.orders)}: {exc}")
            continue
        rows.append({"alpha": list(alpha.orders), **est.as_dict()})
        if est.verdict == Verdict.FAIL:
            reasons.append(f"alpha={list(alpha.orders)}: la estimación crece con la caja (no está en M∞,1)")
    verdict = aggregate(row["verdict"] for row in rows)
    return SubReport("m_infty_one", verdict, reasons=tuple(reasons), evidence={"derivatives": rows})


def _cv_report(f, N_schedule, L_schedule, points) -> SubReport:
    rows, reasons = [], []
    for alpha in _second_derivatives(f):
        try:
            cv = cv_bound_check(f.differentiate(alpha), N_schedule, L_schedule, points)
        except WeylLabError as exc:
            rows.append({"alpha": list(alpha.orders), "verdict": str(Verdict.INCONCLUSIVE), "error": str(exc)})
            reasons.append(f"alpha={list(alpha.orders)}: {exc}")
            continue
        rows.append({"alpha": list(alpha.orders), **cv.as_dict()})
        if cv.verdict == Verdict.FAIL:
            reasons.append(f"alpha={list(alpha.orders)}: las normas no se estabilizan ({list(cv.norms)})")
    verdict = aggregate(row["verdict"] for row in rows)
    return SubReport("cv_bound", verdict, reasons=tuple(reasons), evidence={"derivatives": rows})


def _bc_report(f, L_schedule, grid, levels) -> SubReport:
    V = schrodinger_potential(f)
    if V is None:
        return SubReport("bc_sensitivity", Verdict.INCONCLUSIVE, applicable=False, reasons=("el símbolo no es de la forma xi^2 + V(x)",))
    try:
        table = bc_sensitivity(V, L_schedule, grid, levels)
    except WeylLabError as exc:
        return SubReport("bc_sensitivity", Verdict.INCONCLUSIVE, reasons=(str(exc),))
    reasons = ()
    if table.verdict == Verdict.FAIL:
        reasons = (f"la discrepancia Dirichlet/Neumann persiste al crecer L: {table.low_discrepancies()}",)
    return SubReport("bc_sensitivity", table.verdict, reasons=reasons, evidence=table.as_dict())


def _guarded(name: str, fn) -> SubReport:
    try:
        return fn()
    except WeylLabError as exc:
        logger.warning("%s: %s", name, exc)
        return SubReport(name, Verdict.INCONCLUSIVE, reasons=(str(exc),))


# -----------------------------------------------------------------------------
# Reporte
# -----------------------------------------------------------------------------
def build_report(
    f: SymbolExpr | MatrixSymbol,
    L_schedule=None,
    points: int | None = None,
    threshold: float | None = None,
    N: int | None = None,
    M: int | None = None,
    shifts=None,
    refine: bool = True,
    cv_schedule=None,
    bc_L_schedule=None,
    bc_grid: int | None = None,
    bc_levels: int | None = None,
    config: dict | None = None,
) -> DiagnosticsReport:
    tasks = [
        ("hermitian", lambda: check_hermitian(f)),
        ("simple_criterion", lambda: check_simple_criterion(f, L_schedule, points, threshold)),
        ("oscillation_criterion", lambda: check_oscillation_criterion(f, N, M, shifts, refine)),
        ("m_infty_one", lambda: _mnorm_report(f)),
        ("cv_bound", lambda: _cv_report(f, cv_schedule, L_schedule, points)),
        ("bc_sensitivity", lambda: _bc_report(f, bc_L_schedule, bc_grid, bc_levels)),
    ]
    criteria = tuple(ordered_map(lambda task: _guarded(*task), tasks))
    report = DiagnosticsReport(f.to_text(), f.d, getattr(f, "k", 1), criteria, dict(config or {}))
    logger.info(
        "build_report %s: %s (%s)",
        f.to_text(), report.verdict, {c.name: str(c.verdict) for c in criteria if c.applicable},
    )
    return report

# diagnostics/criteria.py
"""
Sub-criterios ejecutables de autoadjunción esencial.

  simple_criterion       derivadas de orden 2..2d+3 uniformemente acotadas
  oscillation_criterion  || op(∂_j f - ∂_j f(·+z)) || <= c (1 + |z|)
  cv_bound               normas de op(g) en una sucesión de N (meseta)

Cada sub-criterio devuelve un SubReport con veredicto y evidencia. Un error
numérico nunca aborta: el sub-criterio queda INCONCLUSIVE con la razón.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from django.conf import settings

from calculus.oscillation import criterion_fit, oscillation_profile
from common.choices import Growth, Verdict
from common.exceptions import EvaluationError, WeylLabError
from common.parallel import ordered_map
from fock.matrices import operator_norm
from fock.quantize import QuadratureConfig, quantize
from symbols.expr import MatrixSymbol, MultiIndex, SymbolExpr, multi_indices
from symbols.scan import is_hermitian, sup_scan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubReport:
    name: str
    verdict: str
    applicable: bool = True
    reasons: tuple[str, ...] = ()
    evidence: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": str(self.verdict),
            "applicable": self.applicable,
            "reasons": list(self.reasons),
            "evidence": self.evidence,
        }


def aggregate(verdicts: Iterable[str]) -> str:
    """FAIL domina; PASS solo si todos son PASS."""
    verdicts = list(verdicts)
    if any(v == Verdict.FAIL for v in verdicts):
        return Verdict.FAIL
    if verdicts and all(v == Verdict.PASS for v in verdicts):
        return Verdict.PASS
    return Verdict.INCONCLUSIVE


def _scan_budget(count: int) -> int:
    # el presupuesto de puntos se reparte entre todas las derivadas
    total = int(getattr(settings, "WEYL_LAB_SUP_MAX_POINTS", 10_000_000))
    return max(1, total // max(1, count))


def _derivative_scans(f, gammas: Sequence[MultiIndex], L_schedule, points, threshold) -> list[dict]:
    budget = _scan_budget(len(gammas))

    def _one(gamma: MultiIndex) -> dict:
        try:
            est = sup_scan(f.differentiate(gamma), L_schedule, points, threshold, max_points=budget)
        except EvaluationError as exc:
            return {"gamma": list(gamma.orders), "verdict": Growth.INCONCLUSIVE, "error": str(exc)}
        return {"gamma": list(gamma.orders), **est.as_dict()}

    return ordered_map(_one, gammas)


# -----------------------------------------------------------------------------
# Hermiticidad
# -----------------------------------------------------------------------------
def check_hermitian(f: SymbolExpr | MatrixSymbol, L: float = 10.0) -> SubReport:
    try:
        check = is_hermitian(f, L)
    except EvaluationError as exc:
        return SubReport("hermitian", Verdict.INCONCLUSIVE, reasons=(str(exc),))
    reasons = () if check.verdict == Verdict.PASS else (f"el símbolo no es hermitiano (desviación {check.deviation:.3e})",)
    return SubReport("hermitian", check.verdict, reasons=reasons, evidence=check.as_dict())


# -----------------------------------------------------------------------------
# Criterio simple
# -----------------------------------------------------------------------------
def check_simple_criterion(
    f: SymbolExpr | MatrixSymbol,
    L_schedule: Sequence[float] | None = None,
    points: int | None = None,
    threshold: float | None = None,
) -> SubReport:
    d = f.d
    gammas = [g for order in range(2, 2 * d + 4) for g in multi_indices(d, order)]
    table = _derivative_scans(f, gammas, L_schedule, points, threshold)

    growing = [row for row in table if row["verdict"] == Growth.GROWING]
    failed = [row for row in table if "error" in row]
    witness = growing[0]["gamma"] if growing else None

    if growing:
        verdict = Verdict.FAIL
        reasons = (f"la derivada gamma={witness} crece con L",)
    elif failed:
        verdict = Verdict.INCONCLUSIVE
        reasons = tuple(f"gamma={row['gamma']}: {row['error']}" for row in failed)
    elif all(row["verdict"] == Growth.BOUNDED for row in table):
        verdict = Verdict.PASS
        reasons = ()
    else:
        verdict = Verdict.INCONCLUSIVE
        reasons = ("hay derivadas sin veredicto de crecimiento",)

    logger.info("check_simple_criterion %s: %s (testigo %s)", f.to_text(), verdict, witness)
    return SubReport(
        "simple_criterion",
        verdict,
        reasons=reasons,
        evidence={"orders": [2, 2 * d + 3], "table": table, "witness": witness},
    )


# -----------------------------------------------------------------------------
# Criterio de oscilación
# -----------------------------------------------------------------------------
def check_oscillation_criterion(
    f: SymbolExpr | MatrixSymbol,
    N: int | None = None,
    M: int | None = None,
    shifts=None,
    refine: bool = True,
    cfg: QuadratureConfig | None = None,
) -> SubReport:
    directions = []
    reasons = []
    for j in range(1, 2 * f.d + 1):
        try:
            fit = criterion_fit(oscillation_profile(f, j, shifts, N, M, refine, cfg))
        except WeylLabError as exc:
            reasons.append(f"j={j}: {exc}")
            directions.append({"direction": j, "verdict": Verdict.INCONCLUSIVE, "error": str(exc)})
            continue
        directions.append({"direction": j, **fit.as_dict()})
        if fit.verdict == Verdict.FAIL:
            reasons.append(f"j={j}: la oscilación crece (c={fit.c_estimate:.4g}, q={list(fit.octave_ratios)})")

    verdict = aggregate(row["verdict"] for row in directions)
    logger.info("check_oscillation_criterion %s: %s", f.to_text(), verdict)
    return SubReport("oscillation_criterion", verdict, reasons=tuple(reasons), evidence={"directions": directions})


# -----------------------------------------------------------------------------
# Cota de Calderón-Vaillancourt
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class CVBound:
    symbol: str
    N_schedule: tuple[int, ...]
    norms: tuple[float, ...]
    max_derivative_sup: float
    derivatives_bounded: bool
    plateau: bool
    errors: tuple[str, ...] = ()

    @property
    def ratios(self) -> tuple[float, ...]:
        if self.max_derivative_sup == 0.0:
            return tuple(0.0 for _ in self.norms)
        return tuple(n / self.max_derivative_sup for n in self.norms)

    @property
    def verdict(self) -> str:
        if self.errors:
            return Verdict.INCONCLUSIVE
        if self.plateau and self.derivatives_bounded:
            return Verdict.PASS
        if not self.plateau and not self.derivatives_bounded:
            return Verdict.FAIL
        return Verdict.INCONCLUSIVE

    def as_dict(self) -> dict:
        return {
            "symbol": self.symbol,
            "N": list(self.N_schedule),
            "norms": list(self.norms),
            "max_derivative_sup": self.max_derivative_sup,
            "derivatives_bounded": self.derivatives_bounded,
            "plateau": self.plateau,
            "ratios": list(self.ratios),
            "errors": list(self.errors),
            "verdict": str(self.verdict),
        }


def has_plateau(norms: Sequence[float], tolerance: float) -> bool:
    """Aumento <= tolerance en la última duplicación."""
    if len(norms) < 2:
        return False
    prev, last = norms[-2], norms[-1]
    if prev == 0.0:
        return last == 0.0
    return last <= prev * (1.0 + tolerance)


def cv_bound_check(
    f: SymbolExpr | MatrixSymbol,
    N_schedule: Sequence[int] | None = None,
    L_schedule: Sequence[float] | None = None,
    points: int | None = None,
    tolerance: float | None = None,
    cfg: QuadratureConfig | None = None,
) -> CVBound:
    N_schedule = tuple(int(n) for n in (N_schedule or settings.WEYL_LAB_CV_N_SCHEDULE))
    tolerance = float(tolerance if tolerance is not None else settings.WEYL_LAB_PLATEAU_TOLERANCE)

    norms = tuple(ordered_map(lambda N: operator_norm(quantize(f, N, "AUTO", cfg)), N_schedule))

    gammas = [g for order in range(0, 2 * f.d + 2) for g in multi_indices(f.d, order)]
    table = _derivative_scans(f, gammas, L_schedule, points, None)
    errors = tuple(f"gamma={row['gamma']}: {row['error']}" for row in table if "error" in row)
    sups = [row["sups"][-1] for row in table if "sups" in row]
    bounded = not errors and all(row["verdict"] == Growth.BOUNDED for row in table)

    result = CVBound(
        symbol=f.to_text(),
        N_schedule=N_schedule,
        norms=norms,
        max_derivative_sup=max(sups) if sups else 0.0,
        derivatives_bounded=bounded,
        plateau=has_plateau(norms, tolerance),
        errors=errors,
    )
    logger.info("cv_bound_check %s: normas %s -> %s", f.to_text(), [f"{n:.4g}" for n in norms], result.verdict)
    return result

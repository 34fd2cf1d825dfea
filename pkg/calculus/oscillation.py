# calculus/oscillation.py
"""
Estimador del criterio de oscilación

    || op(∂_j f - ∂_j f(· + z)) || <= c (1 + |z|)

sobre una muestra finita de desplazamientos. Las normas truncadas son cotas
inferiores: un PASS es evidencia, nunca una prueba.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from django.conf import settings

from common.choices import Verdict
from common.exceptions import InsufficientSamples
from common.parallel import ordered_map
from fock.quantize import QuadratureConfig, quantize
from symbols.expr import MatrixSymbol, MultiIndex, PhasePoint, SymbolExpr

from .derivatives import restricted_norm

logger = logging.getLogger(__name__)

LOWER_BOUND_CAVEAT = (
    "Las normas truncadas son cotas inferiores de las normas reales; "
    "un PASS es evidencia, no una prueba."
)
UNCONVERGED_CAVEAT = "La norma sigue creciendo al refinar (N, M) -> (2N, 2M): operador probablemente no acotado."


@dataclass(frozen=True)
class OscillationProfile:
    direction: int
    shifts: tuple[PhasePoint, ...]
    norms: tuple[float, ...]
    N: int
    M: int
    refined_norms: tuple[float, ...] | None = None
    refined_N: int | None = None
    refined_M: int | None = None

    def as_dict(self) -> dict:
        return {
            "direction": self.direction,
            "shifts": [list(z.coords) for z in self.shifts],
            "norms": list(self.norms),
            "N": self.N,
            "M": self.M,
            "refined_norms": None if self.refined_norms is None else list(self.refined_norms),
            "refined_N": self.refined_N,
            "refined_M": self.refined_M,
        }


@dataclass(frozen=True)
class CriterionVerdict:
    verdict: str
    c_estimate: float
    max_ratio: float
    evidence: tuple[dict, ...] = ()
    caveats: tuple[str, ...] = ()
    refined_c_estimate: float | None = None
    octave_ratios: tuple[float, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "verdict": str(self.verdict),
            "c_estimate": self.c_estimate,
            "max_ratio": self.max_ratio,
            "evidence": list(self.evidence),
            "caveats": list(self.caveats),
            "refined_c_estimate": self.refined_c_estimate,
            "octave_ratios": list(self.octave_ratios),
        }


def default_shifts(d: int, magnitudes: Sequence[float] | None = None) -> tuple[PhasePoint, ...]:
    """z = 0 más cada eje coordenado por cada magnitud."""
    magnitudes = magnitudes or settings.WEYL_LAB_SHIFT_MAGNITUDES
    shifts = [PhasePoint.zero(d)]
    for axis in range(2 * d):
        shifts.extend(PhasePoint.axis(d, axis, float(m)) for m in magnitudes)
    return tuple(shifts)


def _norms(g, shifts, N: int, M: int, cfg: QuadratureConfig | None) -> list[float]:
    def _one(z: PhasePoint) -> float:
        diff = g - g.shift(z)
        op = quantize(diff, N, "AUTO", cfg)
        return restricted_norm(op, M)

    return ordered_map(_one, shifts)


def oscillation_profile(
    f: SymbolExpr | MatrixSymbol,
    j: int,
    shifts: Sequence[PhasePoint] | None = None,
    N: int | None = None,
    M: int | None = None,
    refine: bool = True,
    cfg: QuadratureConfig | None = None,
) -> OscillationProfile:
    """j en 1..2d (x_1..x_d, xi_1..xi_d)."""
    if not 1 <= j <= 2 * f.d:
        raise ValueError(f"dirección j={j} fuera de 1..{2 * f.d}")
    N = int(N or settings.WEYL_LAB_OSCILLATION_N)
    M = int(M or settings.WEYL_LAB_OSCILLATION_M)
    shifts = tuple(z if isinstance(z, PhasePoint) else PhasePoint.of(z) for z in (shifts or default_shifts(f.d)))

    g = f.differentiate(MultiIndex.unit(f.d, j - 1))
    norms = _norms(g, shifts, N, M, cfg)

    refined = None
    if refine:
        refined = _norms(g, shifts, 2 * N, 2 * M, None if cfg is None else cfg.for_size(2 * N))

    _log_continuity(j, shifts, norms)
    return OscillationProfile(
        direction=j,
        shifts=shifts,
        norms=tuple(norms),
        N=N,
        M=M,
        refined_norms=None if refined is None else tuple(refined),
        refined_N=2 * N if refine else None,
        refined_M=2 * M if refine else None,
    )


def _log_continuity(j: int, shifts, norms) -> None:
    lip = 0.0
    for a in range(len(shifts)):
        for b in range(a + 1, len(shifts)):
            dist = (shifts[a] + (-shifts[b])).norm()
            if dist > 0:
                lip = max(lip, abs(norms[a] - norms[b]) / dist)
    logger.debug("oscillation_profile j=%d: Lipschitz empírico %.4g", j, lip)


def _per_magnitude(profile: OscillationProfile, norms: Sequence[float]) -> dict[float, float]:
    ratios: dict[float, float] = {}
    for z, n in zip(profile.shifts, norms):
        mag = round(z.norm(), 12)
        if mag == 0.0:
            continue
        ratios[mag] = max(ratios.get(mag, 0.0), n / (1.0 + mag))
    return dict(sorted(ratios.items()))


def _octave_ratios(values: Sequence[float]) -> list[float]:
    out = []
    for prev, cur in zip(values, values[1:]):
        if prev == 0.0:
            out.append(1.0 if cur == 0.0 else math.inf)
        else:
            out.append(cur / prev)
    return out


def criterion_fit(
    profile: OscillationProfile,
    growth_threshold: float | None = None,
    stability_window: float | None = None,
    refinement_tolerance: float | None = None,
) -> CriterionVerdict:
    growth_threshold = float(growth_threshold or settings.WEYL_LAB_GROWTH_THRESHOLD)
    stability_window = float(stability_window or settings.WEYL_LAB_STABILITY_WINDOW)
    refinement_tolerance = float(refinement_tolerance or settings.WEYL_LAB_REFINEMENT_TOLERANCE)

    base = _per_magnitude(profile, profile.norms)
    if len(base) < 3:
        raise InsufficientSamples(f"se necesitan >= 3 octavas de |z| (hay {len(base)})")

    c_estimate = max(base.values())
    max_ratio = c_estimate
    caveats = [LOWER_BOUND_CAVEAT]
    unconverged = False
    refined_c = None
    ratios_source = base

    if profile.refined_norms is not None:
        refined = _per_magnitude(profile, profile.refined_norms)
        refined_c = max(refined.values())
        max_ratio = max(max_ratio, refined_c)
        unconverged = refined_c > c_estimate * (1.0 + refinement_tolerance) + 1e-12
        ratios_source = refined
        if unconverged:
            caveats.append(UNCONVERGED_CAVEAT)

    q = _octave_ratios(list(ratios_source.values()))
    growing = sum(1 for v in q if v > growth_threshold)
    final_q = q[-1]

    if growing >= 2 or (unconverged and final_q > stability_window):
        verdict = Verdict.FAIL
    elif final_q <= stability_window and not unconverged:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.INCONCLUSIVE

    evidence = tuple(
        {"z": list(z.coords), "norm": n, "ratio": n / (1.0 + z.norm())}
        for z, n in zip(profile.shifts, profile.norms)
    )
    logger.info(
        "criterion_fit j=%d: %s (c=%.4g, q=%s, sin converger=%s)",
        profile.direction, verdict, c_estimate, [round(v, 4) for v in q], unconverged,
    )
    return CriterionVerdict(
        verdict=verdict,
        c_estimate=c_estimate,
        max_ratio=max_ratio,
        evidence=evidence,
        caveats=tuple(caveats),
        refined_c_estimate=refined_c,
        octave_ratios=tuple(q),
    )

from __future__ import annotations

from django.db import models

from common.choices import Verdict


class DiagnosticRun(models.Model):
    """Bitácora de corridas de weyl_check --record. Los artefactos en disco mandan."""

    symbol = models.CharField("Símbolo", max_length=500)
    d = models.PositiveSmallIntegerField("Grados de libertad", default=1)
    k = models.PositiveSmallIntegerField("Dimensión de coeficientes", default=1)

    verdict = models.CharField("Veredicto", max_length=16, choices=Verdict.choices)

    report = models.JSONField("Reporte", default=dict)
    config = models.JSONField("Configuración efectiva", default=dict)

    created_at = models.DateTimeField("Fecha de creación", auto_now_add=True)

    class Meta:
        verbose_name = "Corrida de diagnóstico"
        verbose_name_plural = "Corridas de diagnóstico"
        ordering = ["-created_at", "-id"]
        indexes = [
            models.Index(fields=["symbol"], name="diagnostics_symbol_idx"),
            models.Index(fields=["verdict"], name="diagnostics_verdict_idx"),
        ]

    def __str__(self):
        return f"{self.symbol} ({self.verdict})"

    @classmethod
    def record(cls, report, config: dict | None = None) -> "DiagnosticRun":
        return cls.objects.create(
            symbol=report.symbol,
            d=report.d,
            k=report.k,
            verdict=str(report.verdict),
            report=report.as_dict(),
            config=dict(config or report.config),
        )

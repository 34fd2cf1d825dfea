# core/management/commands/weyl_check.py
from pathlib import Path

from calculus.oscillation import default_shifts
from diagnostics.models import DiagnosticRun
from diagnostics.report import build_report

from core.management.base import WeylCommand, add_symbol_arguments


class Command(WeylCommand):
    help = "Ejecuta los criterios de autoadjunción esencial y escribe el reporte JSON (0 PASS, 10 FAIL, 11 INCONCLUSIVE)."
    config_keys = (
        "symbol", "d", "L_schedule", "points", "threshold", "N", "M", "shifts", "refine",
        "cv_schedule", "bc_L_schedule", "grid", "levels",
    )

    def add_command_arguments(self, parser):
        add_symbol_arguments(parser)
        parser.add_argument("--L", dest="L_schedule", help="Cajas del barrido sup, p.ej. 1,10,100,1000")
        parser.add_argument("--points", type=int, help="Puntos por eje del barrido")
        parser.add_argument("--threshold", type=float, help="Umbral de crecimiento por octava")
        parser.add_argument("--N", type=int, help="Truncación del criterio de oscilación")
        parser.add_argument("--M", type=int, help="Bloque de confianza")
        parser.add_argument("--shifts", help="Magnitudes de desplazamiento, p.ej. 1,2,4,8")
        parser.add_argument("--no-refine", dest="refine", action="store_false", default=None)
        parser.add_argument("--cv-N", dest="cv_schedule", help="Sucesión de N para la cota CV")
        parser.add_argument("--bc-L", dest="bc_L_schedule", help="Semianchuras para la sensibilidad de borde")
        parser.add_argument("--bc-grid", dest="grid", type=int)
        parser.add_argument("--bc-levels", dest="levels", type=int)
        parser.add_argument("--out", help="Reporte JSON (por omisión a stdout)")
        parser.add_argument("--record", action="store_true", default=None, help="Guardar la corrida en la base de datos")

    def run(self, form, options):
        f = self.symbol(form)
        c = form.cleaned_data
        shifts = default_shifts(f.d, c["shifts"]) if c.get("shifts") else None
        effective = self.effective(form)

        report = build_report(
            f,
            L_schedule=c.get("L_schedule"),
            points=c.get("points"),
            threshold=c.get("threshold"),
            N=c.get("N"),
            M=c.get("M"),
            shifts=shifts,
            refine=form.value("refine") is not False,
            cv_schedule=c.get("cv_schedule"),
            bc_L_schedule=c.get("bc_L_schedule"),
            bc_grid=c.get("grid"),
            bc_levels=c.get("levels"),
            config=effective,
        )

        out = c.get("out")
        if out:
            path = Path(out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(report.to_json(), encoding="utf-8")
        else:
            self.stdout.write(report.to_json(), ending="")

        for sub in report.criteria:
            state = str(sub.verdict) if sub.applicable else "N/A"
            self.stderr.write(f"{sub.name}: {state}")
        self.stderr.write(f"veredicto: {report.verdict}")

        if c.get("record"):
            run = DiagnosticRun.record(report)
            self.stderr.write(f"corrida #{run.pk} registrada")

        self.exit_for(report.verdict)

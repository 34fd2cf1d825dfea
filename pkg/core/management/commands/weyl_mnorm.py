# core/management/commands/weyl_mnorm.py
from bargmann.heat import SampledSymbol
from common.utils import write_json
from diagnostics.mnorm import m_infty_one_norm

from core.management.base import WeylCommand, add_symbol_arguments


class Command(WeylCommand):
    help = "Estima la norma M∞,1 (Sjöstrand) de un símbolo o de un símbolo muestreado; sale con 3 si no converge."
    config_keys = ("symbol", "sampled", "d", "R", "spacing", "tolerance")

    def add_command_arguments(self, parser):
        add_symbol_arguments(parser)
        parser.add_argument("--sampled", help="Archivo de SampledSymbol (en lugar de --symbol)")
        parser.add_argument("--R", type=float, help="Semianchura de la caja")
        parser.add_argument("--spacing", type=float, help="Paso de la malla")
        parser.add_argument("--tolerance", type=float, help="Cambio relativo admitido (default WEYL_LAB_MNORM_TOLERANCE)")
        parser.add_argument("--out", help="JSON de salida")

    def run(self, form, options):
        c = form.cleaned_data
        if c.get("sampled"):
            g = SampledSymbol.load(c["sampled"])
            effective = form.effective(("sampled", "tolerance"))
        else:
            g = self.symbol(form)
            effective = self.effective(form)

        est = m_infty_one_norm(g, c.get("R"), c.get("spacing"), c.get("tolerance"))
        if c.get("out"):
            write_json(c["out"], {**est.as_dict(), "config": effective})

        self.emit(f"norma M∞,1: {est.value:.12g}")
        self.emit(f"cambio al duplicar la caja: {est.box_change:.3e}")
        self.emit(f"cambio al duplicar la malla: {est.grid_change:.3e}")
        est.require_converged()
        self.stdout.write(self.style.SUCCESS("OK - estimación estable"))

# core/management/commands/weyl_bc.py
from diagnostics.spectra import bc_sensitivity
from symbols.parser import parse

from core.management.base import WeylCommand


class Command(WeylCommand):
    help = "Sensibilidad a condiciones de borde de -d^2/dx^2 + V(x) (CSV L,bc,level,eigenvalue)."
    config_keys = ("potential", "bc_L_schedule", "grid", "levels", "tolerance")

    def add_command_arguments(self, parser):
        parser.add_argument("--potential", help='Potencial V(x), p.ej. "x^3"')
        parser.add_argument("--L", dest="bc_L_schedule", help="Semianchuras, p.ej. 8,10,12")
        parser.add_argument("--grid", type=int, help="Subintervalos de la malla (>= 500)")
        parser.add_argument("--levels", type=int, help="Niveles más bajos a calcular")
        parser.add_argument("--tolerance", type=float, help="Cambio relativo admitido al duplicar la malla")
        parser.add_argument("--out", help="CSV de salida")

    def run(self, form, options):
        c = form.cleaned_data
        if not c.get("potential"):
            raise self.missing("potential")
        V = parse(c["potential"], 1)
        table = bc_sensitivity(V, c.get("bc_L_schedule"), c.get("grid"), c.get("levels"), c.get("tolerance"))

        effective = self.effective(form)
        if c.get("out"):
            table.to_csv(c["out"], effective)
        else:
            self.emit("L,bc,level,eigenvalue")
            for L, bc, level, value in table.rows():
                self.emit(f"{L!r},{bc},{level},{value!r}")

        for L, low in zip(table.L, table.low_discrepancies()):
            self.stderr.write(f"L={L:g}: discrepancia Dirichlet/Neumann {low:.3e}")
        self.stderr.write(f"veredicto: {table.verdict}")
        if c.get("out"):
            self.stdout.write(self.style.SUCCESS(f"OK - tabla escrita en {c['out']}"))

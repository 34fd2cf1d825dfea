# core/management/commands/weyl_spectrum.py
import numpy as np

from common.utils import write_csv
from diagnostics.spectra import quantized_spectrum

from core.management.base import WeylCommand, add_symbol_arguments

COLUMNS = ("level", "eigenvalue")


class Command(WeylCommand):
    help = "Autovalores de op(f) truncado a N (CSV level,eigenvalue)."
    config_keys = ("symbol", "d", "N", "method")

    def add_command_arguments(self, parser):
        add_symbol_arguments(parser)
        parser.add_argument("--N", type=int)
        parser.add_argument("--method", help="auto | monomial | kernel")
        parser.add_argument("--levels", type=int, help="Cantidad de autovalores a escribir (default: todos)")
        parser.add_argument("--out", help="CSV de salida")

    def run(self, form, options):
        f = self.symbol(form)
        c = form.cleaned_data
        values = quantized_spectrum(f, form.value("N"), c.get("method") or "AUTO")
        if c.get("levels"):
            values = values[: c["levels"]]
        values = np.real_if_close(values, tol=1000)

        effective = self.effective(form)
        if c.get("levels"):
            # sin default en settings: los niveles de bc no aplican aquí
            effective["levels"] = c["levels"]
        rows = [(i, v.item() if np.isrealobj(values) else complex(v)) for i, v in enumerate(values)]

        if c.get("out"):
            write_csv(c["out"], COLUMNS, rows, effective)
            self.stdout.write(self.style.SUCCESS(f"OK - {len(rows)} autovalores en {c['out']}"))
        else:
            self.emit(",".join(COLUMNS))
            for level, value in rows:
                self.emit(f"{level},{value!r}")

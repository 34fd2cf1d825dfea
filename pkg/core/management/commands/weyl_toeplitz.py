# core/management/commands/weyl_toeplitz.py
from bargmann.toeplitz import calibrate_heat_time, heat_toeplitz_residual, toeplitz_matrix
from common.exceptions import Unconverged
from common.utils import dumps_stable
from fock.matrices import operator_norm

from core.management.base import WeylCommand, add_symbol_arguments

HEAT_TOLERANCE = 1e-4


class Command(WeylCommand):
    help = "Matriz de Toeplitz (anti-Wick) de un símbolo con d <= 2; opcionalmente verifica T_f = op(heat(f))."
    config_keys = ("symbol", "d", "N", "M", "format", "verify_heat", "heat_time", "tolerance")

    def add_command_arguments(self, parser):
        add_symbol_arguments(parser)
        parser.add_argument("--N", type=int)
        parser.add_argument("--M", type=int, help="Bloque de confianza de la verificación (default N/4)")
        parser.add_argument("--format", choices=["json", "binary"])
        parser.add_argument("--verify-heat", dest="verify_heat", action="store_true", default=None)
        parser.add_argument("--heat-time", dest="heat_time", type=float)
        parser.add_argument("--tolerance", type=float, help=f"Residuo admitido (default {HEAT_TOLERANCE:g})")
        parser.add_argument("--calibrate", action="store_true", help="Recorrer la familia de núcleos y mostrar el tiempo calibrado")
        parser.add_argument("--out", help="Archivo de salida")

    def run(self, form, options):
        c = form.cleaned_data
        if options.get("calibrate"):
            self.emit(dumps_stable(calibrate_heat_time().as_dict()).rstrip())
            if not c.get("symbol"):
                return

        f = self.symbol(form)
        N = form.value("N")
        T = toeplitz_matrix(f, N)
        effective = self.effective(form)
        if c.get("M") is None:
            effective["M"] = max(1, N // 4)

        self.emit(f"desviacion hermitiana: {T.hermitian_deviation():.3e}")
        self.emit(f"norma: {operator_norm(T):.12g}")

        if c.get("verify_heat"):
            tolerance = c.get("tolerance") or HEAT_TOLERANCE
            residual = heat_toeplitz_residual(f, N, effective["M"], c.get("heat_time"))
            effective["heat_residual"] = residual
            self.emit(f"residuo heat/Toeplitz: {residual:.3e}")
            if residual > tolerance:
                raise Unconverged(f"T_f y op(heat(f)) difieren en {residual:.3e} (> {tolerance:g})")

        out = c.get("out")
        if out:
            fmt = c.get("format") or "json"
            T.with_entries(T.entries, config=effective).save(out, fmt)
            if fmt == "binary":
                self.write_sidecar(out, effective)
            self.stdout.write(self.style.SUCCESS(f"OK - matriz escrita en {out}"))

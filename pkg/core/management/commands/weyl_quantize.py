# core/management/commands/weyl_quantize.py
from fock.matrices import operator_norm
from fock.quantize import QuadratureConfig, quantize

from core.management.base import WeylCommand, add_symbol_arguments


class Command(WeylCommand):
    help = "Cuantiza un símbolo en la base de Fock truncada y guarda la matriz (JSON o binario)."
    config_keys = ("symbol", "d", "N", "method", "format", "refine")

    def add_command_arguments(self, parser):
        add_symbol_arguments(parser)
        parser.add_argument("--N", type=int, help="Truncación por modo")
        parser.add_argument("--method", help="auto | monomial | kernel")
        parser.add_argument("--format", choices=["json", "binary"])
        parser.add_argument("--refine", action="store_true", default=None, help="Verificar la malla de cuadratura duplicándola (default de settings)")
        parser.add_argument("--no-refine", dest="refine", action="store_false")
        parser.add_argument("--out", help="Archivo de salida")

    def run(self, form, options):
        f = self.symbol(form)
        N = form.value("N")
        cfg = QuadratureConfig.default_for(N, refine=bool(form.value("refine")))
        A = quantize(f, N, form.cleaned_data.get("method") or "AUTO", cfg)

        effective = self.effective(form)
        A = A.with_entries(A.entries, config=effective)
        out = form.cleaned_data.get("out")
        fmt = form.cleaned_data.get("format") or "json"
        if out:
            A.save(out, fmt)
            if fmt == "binary":
                self.write_sidecar(out, effective)

        self.emit(f"metodo: {A.method}")
        self.emit(f"desviacion hermitiana: {A.hermitian_deviation():.3e}")
        self.emit(f"norma: {operator_norm(A):.12g}")
        if out:
            self.stdout.write(self.style.SUCCESS(f"OK - matriz escrita en {out}"))

# core/management/commands/weyl_oracle.py
"""
Oráculos lentos: recalculan un valor por cuadratura directa y lo comparan con
el camino rápido. Imprime ambos resultados y la diferencia.
"""
import numpy as np

from bargmann import oracles as bargmann_oracles
from common.exceptions import InvalidConfig, Unconverged
from common.utils import write_json
from fock import oracles as fock_oracles
from fock.oracles import OracleResult
from symbols.expr import PhasePoint

from core.management.base import WeylCommand

SUBJECTS = (
    "ladder-entry",
    "momentum-entry",
    "harmonic",
    "kernel-element",
    "weyl-overlap",
    "projective-phase",
    "coherent-overlap",
    "toeplitz-coherent",
    "heat-moment",
)
RANDOM_BOX = 1.0


class Command(WeylCommand):
    help = "Compara un oráculo de cuadratura lenta con el camino rápido (sujetos: " + ", ".join(SUBJECTS) + ")."
    config_keys = ("symbol", "d", "N", "row", "col", "level", "z", "w", "heat_time", "points", "seed", "samples")

    def add_command_arguments(self, parser):
        parser.add_argument("subject", choices=SUBJECTS)
        parser.add_argument("--symbol")
        parser.add_argument("--N", type=int)
        parser.add_argument("--row", type=int)
        parser.add_argument("--col", type=int)
        parser.add_argument("--level", type=int)
        parser.add_argument("--z", help="Punto de fase x,xi (usar --z=-1,2 para valores negativos)")
        parser.add_argument("--w", help="Segundo punto de fase para projective-phase")
        parser.add_argument("--t", dest="heat_time", type=float)
        parser.add_argument("--points", type=int, help="Puntos por eje de la cuadratura cartesiana")
        parser.add_argument("--seed", type=int, help="Semilla de los pares aleatorios de projective-phase")
        parser.add_argument("--samples", type=int, help="Cantidad de pares aleatorios (default 20)")
        parser.add_argument("--tolerance", type=float, help="Falla (código 3) si la diferencia la supera")
        parser.add_argument("--out", help="JSON de salida")

    # -------------------------------------------------------------------------
    def _point(self, form, name: str) -> PhasePoint:
        coords = form.cleaned_data.get(name)
        if not coords:
            raise InvalidConfig(f"el sujeto requiere --{name}")
        return PhasePoint.of(coords)

    def _symbol(self, form):
        if not form.cleaned_data.get("d"):
            form.cleaned_data["d"] = 1
        if form.cleaned_data["d"] != 1:
            raise InvalidConfig("los oráculos de cuadratura son de un modo (d=1)")
        return self.symbol(form, matrix=False)

    def _random_pairs(self, form) -> list[OracleResult]:
        rng = np.random.default_rng(form.cleaned_data.get("seed") or 0)
        samples = form.cleaned_data.get("samples") or 20
        coords = rng.uniform(-RANDOM_BOX, RANDOM_BOX, size=(samples, 2, 2))
        N = form.value("N")
        return [fock_oracles.projective_phase(PhasePoint.of(z), PhasePoint.of(w), N) for z, w in coords]

    def compute(self, subject: str, form) -> list[OracleResult]:
        c = form.cleaned_data
        row, col = c.get("row") or 0, c.get("col")
        level = c.get("level") or 0
        points = c.get("points") or 401

        if subject == "ladder-entry":
            return [fock_oracles.ladder_entry(row, 1 if col is None else col, form.value("N"))]
        if subject == "momentum-entry":
            return [fock_oracles.momentum_entry(row, 1 if col is None else col, form.value("N"))]
        if subject == "harmonic":
            return [fock_oracles.harmonic_level(level, form.value("N"))]
        if subject == "kernel-element":
            return [fock_oracles.kernel_element(self._symbol(form), row, col or 0, form.value("N"))]
        if subject == "weyl-overlap":
            return [fock_oracles.weyl_overlap(self._point(form, "z"), row, col or 0, form.value("N"))]
        if subject == "projective-phase":
            if c.get("z") or c.get("w"):
                return [fock_oracles.projective_phase(self._point(form, "z"), self._point(form, "w"), form.value("N"))]
            return self._random_pairs(form)
        if subject == "coherent-overlap":
            return [bargmann_oracles.coherent_overlap(self._point(form, "z"), level, form.value("N"))]
        if subject == "toeplitz-coherent":
            return [bargmann_oracles.toeplitz_coherent(self._symbol(form), row, col or 0, form.value("N"), points)]
        return [bargmann_oracles.heat_moment(self._symbol(form), self._point(form, "z"), c.get("heat_time"), points)]

    def run(self, form, options):
        subject = options["subject"]
        results = self.compute(subject, form)

        for r in results:
            self.emit(f"{r.subject} {r.params}")
            self.emit(f"  oraculo:    {_fmt(r.oracle)}")
            self.emit(f"  rapido:     {_fmt(r.fast)}")
            self.emit(f"  diferencia: {r.difference:.3e}")
        worst = max(r.difference for r in results)
        if len(results) > 1:
            spread = max(abs(1.0 - abs(complex(r.fast))) for r in results)
            self.emit(f"max diferencia: {worst:.3e}; max ||c| - 1|: {spread:.3e}")

        if form.cleaned_data.get("out"):
            effective = {"subject": subject, **form.effective(self.config_keys)}
            write_json(form.cleaned_data["out"], {"results": [r.as_dict() for r in results], "config": effective})

        tolerance = form.cleaned_data.get("tolerance")
        if tolerance is not None and worst > tolerance:
            raise Unconverged(f"{subject}: oráculo y camino rápido difieren en {worst:.3e} (> {tolerance:g})")


def _fmt(v) -> str:
    v = complex(v)
    if v.imag == 0:
        return f"{v.real:.15g}"
    return f"{v.real:.15g} {v.imag:+.15g}i"

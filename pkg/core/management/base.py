# core/management/base.py
"""
Base común de los comandos weyl_*.

Códigos de salida (contrato estable):
  0   éxito / PASS
  2   error de sintaxis del símbolo o configuración inválida
  3   falla numérica (cualquier otro WeylLabError)
  10  FAIL
  11  INCONCLUSIVE
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from common.choices import Verdict
from common.exceptions import WeylLabError, exit_code_for
from common.parallel import set_workers
from common.utils import write_json
from core.forms import RunConfigForm
from symbols.parser import parse, parse_symbol

logger = logging.getLogger(__name__)

VERDICT_EXIT = {Verdict.PASS: 0, Verdict.FAIL: 10, Verdict.INCONCLUSIVE: 11}


def add_symbol_arguments(parser):
    parser.add_argument("--symbol", help='Símbolo, p.ej. "x^2 + xi^2" o "[[cos(x), sin(x)],[sin(x), -cos(x)]]"')
    parser.add_argument("--d", type=int, help="Grados de libertad (default 1)")


class WeylCommand(BaseCommand):
    # claves de RunConfigForm que este comando registra en la config efectiva
    config_keys: tuple[str, ...] = ()

    def add_arguments(self, parser):
        parser.add_argument("--config", help="Archivo JSON de configuración (los flags tienen prioridad)")
        parser.add_argument("--workers", type=int, help="Límite global de workers (fallback: WEYL_LAB_WORKERS)")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    # -------------------------------------------------------------------------
    def flags(self, options) -> dict:
        """Opciones de argparse -> claves de RunConfigForm."""
        return {k: options.get(k) for k in RunConfigForm.base_fields if k in options}

    def handle(self, *args, **options):
        try:
            form = RunConfigForm.from_sources(self.flags(options), options.get("config"))
            set_workers(form.cleaned_data.get("workers"))
            return self.run(form, options)
        except WeylLabError as exc:
            logger.warning("%s: %s", self.__class__.__module__.rsplit(".", 1)[-1], exc)
            raise CommandError(str(exc), returncode=exit_code_for(exc)) from exc
        finally:
            set_workers(None)

    def run(self, form: RunConfigForm, options):
        raise NotImplementedError

    # -------------------------------------------------------------------------
    def missing(self, field: str) -> CommandError:
        return CommandError(f"falta --{field}", returncode=2)

    def symbol(self, form: RunConfigForm, field: str = "symbol", matrix: bool = True):
        text = form.cleaned_data.get(field)
        if not text:
            raise self.missing(field)
        d = form.cleaned_data.get("d") or 1
        return parse_symbol(text, d) if matrix else parse(text, d)

    def effective(self, form: RunConfigForm) -> dict:
        cfg = form.effective(self.config_keys)
        if "d" in self.config_keys:
            cfg.setdefault("d", 1)
        return cfg

    def write_sidecar(self, path, cfg: dict) -> Path:
        path = Path(path)
        return write_json(path.with_name(path.name + ".config.json"), cfg)

    def emit(self, line: str = ""):
        self.stdout.write(line)

    def exit_for(self, verdict):
        code = VERDICT_EXIT[Verdict(verdict)]
        if code:
            raise SystemExit(code)

import json
from pathlib import Path

from django import forms
from django.conf import settings

from common.choices import QuantizeMethod
from common.exceptions import InvalidConfig

FORMATS = (("json", "JSON"), ("binary", "Binario"))

# campo -> setting que da el valor por omisión (para la config efectiva)
SETTINGS_DEFAULTS = {
    "N": "WEYL_LAB_N",
    "M": "WEYL_LAB_OSCILLATION_M",
    "L_schedule": "WEYL_LAB_L_SCHEDULE",
    "points": "WEYL_LAB_SUP_POINTS",
    "threshold": "WEYL_LAB_GROWTH_THRESHOLD",
    "shifts": "WEYL_LAB_SHIFT_MAGNITUDES",
    "cv_schedule": "WEYL_LAB_CV_N_SCHEDULE",
    "bc_L_schedule": "WEYL_LAB_BC_L_SCHEDULE",
    "grid": "WEYL_LAB_BC_GRID",
    "levels": "WEYL_LAB_BC_LEVELS",
    "heat_time": "WEYL_LAB_HEAT_TIME",
    "R": "WEYL_LAB_MNORM_HALF_WIDTH",
    "spacing": "WEYL_LAB_MNORM_SPACING",
    "refine": "WEYL_LAB_KERNEL_REFINE",
    "workers": "WEYL_LAB_WORKERS",
}


class NumberListField(forms.Field):
    """Acepta "1,10,100" o [1, 10, 100]."""

    def __init__(self, *args, integer=False, increasing=True, **kwargs):
        self.integer = integer
        self.increasing = increasing
        super().__init__(*args, **kwargs)

    def to_python(self, value):
        if value in self.empty_values:
            return None
        parts = value.split(",") if isinstance(value, str) else value
        cast = int if self.integer else float
        try:
            out = [cast(p) for p in parts if str(p).strip()]
        except (TypeError, ValueError):
            raise forms.ValidationError(f"lista de números inválida: {value!r}")
        if not out:
            raise forms.ValidationError("la lista no puede estar vacía")
        return out

    def validate(self, value):
        super().validate(value)
        if value and self.increasing and any(b <= a for a, b in zip(value, value[1:])):
            raise forms.ValidationError(f"la lista debe ser creciente: {value}")


class RunConfigForm(forms.Form):
    symbol = forms.CharField(required=False, strip=True)
    potential = forms.CharField(required=False, strip=True)
    d = forms.IntegerField(required=False, min_value=1, max_value=2)
    N = forms.IntegerField(required=False, min_value=1, max_value=4096)
    M = forms.IntegerField(required=False, min_value=1)
    method = forms.CharField(required=False)
    format = forms.ChoiceField(required=False, choices=FORMATS)
    out = forms.CharField(required=False)
    sampled = forms.CharField(required=False)

    L_schedule = NumberListField(required=False)
    points = forms.IntegerField(required=False, min_value=3)
    threshold = forms.FloatField(required=False, min_value=1.0)
    shifts = NumberListField(required=False)
    refine = forms.NullBooleanField(required=False)
    cv_schedule = NumberListField(required=False, integer=True)

    bc_L_schedule = NumberListField(required=False)
    grid = forms.IntegerField(required=False, min_value=500)
    levels = forms.IntegerField(required=False, min_value=1)

    heat_time = forms.FloatField(required=False)
    verify_heat = forms.NullBooleanField(required=False)
    R = forms.FloatField(required=False)
    spacing = forms.FloatField(required=False)
    tolerance = forms.FloatField(required=False)

    workers = forms.IntegerField(required=False, min_value=1)
    seed = forms.IntegerField(required=False, min_value=0)
    record = forms.NullBooleanField(required=False)

    # parámetros de weyl_oracle
    row = forms.IntegerField(required=False, min_value=0)
    col = forms.IntegerField(required=False, min_value=0)
    level = forms.IntegerField(required=False, min_value=0)
    z = NumberListField(required=False, increasing=False)
    w = NumberListField(required=False, increasing=False)
    samples = forms.IntegerField(required=False, min_value=1, max_value=1000)

    def clean_method(self):
        raw = (self.cleaned_data.get("method") or "").strip().upper()
        if not raw:
            return None
        if raw not in QuantizeMethod.values:
            raise forms.ValidationError(f"método desconocido: {raw.lower()!r}")
        return raw

    def clean_heat_time(self):
        t = self.cleaned_data.get("heat_time")
        if t is not None and t <= 0:
            raise forms.ValidationError("el tiempo de calor debe ser positivo")
        return t

    def clean(self):
        c = super().clean()
        N, M = c.get("N"), c.get("M")
        if N and M and M > N:
            raise forms.ValidationError("M no puede superar a N (bloque de confianza)")
        for name in ("R", "spacing", "tolerance"):
            v = c.get(name)
            if v is not None and v <= 0:
                self.add_error(name, "debe ser positivo")
        for name in ("L_schedule", "bc_L_schedule", "shifts", "cv_schedule"):
            values = c.get(name) or []
            if any(v <= 0 for v in values):
                self.add_error(name, "los valores deben ser positivos")
        return c

    # -------------------------------------------------------------------------
    @classmethod
    def from_sources(cls, flags: dict, config_path=None) -> "RunConfigForm":
        """flags > archivo JSON > settings. Claves desconocidas => InvalidConfig."""
        data = {}
        if config_path:
            try:
                data = json.loads(Path(config_path).read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                raise InvalidConfig(f"no se pudo leer la configuración {config_path}: {exc}") from exc
            if not isinstance(data, dict):
                raise InvalidConfig("el archivo de configuración debe ser un objeto JSON")
            unknown = sorted(set(data) - set(cls.base_fields))
            if unknown:
                raise InvalidConfig(f"claves desconocidas en la configuración: {', '.join(unknown)}")
        data.update({k: v for k, v in flags.items() if v is not None})

        form = cls(data=data)
        if not form.is_valid():
            errors = "; ".join(f"{field}: {' '.join(msgs)}" for field, msgs in form.errors.items())
            raise InvalidConfig(f"configuración inválida: {errors}")
        return form

    def value(self, name: str):
        v = self.cleaned_data.get(name)
        if v is None and name in SETTINGS_DEFAULTS:
            v = getattr(settings, SETTINGS_DEFAULTS[name], None)
        return v

    def effective(self, keys) -> dict:
        """Config efectiva (sin None) que viaja con cada artefacto."""
        out = {}
        for name in keys:
            v = self.value(name)
            if v is not None:
                out[name] = list(v) if isinstance(v, (list, tuple)) else v
        return out

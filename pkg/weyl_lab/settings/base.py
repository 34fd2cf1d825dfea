import os
from pathlib import Path

import dj_database_url
from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent.parent  # 3 niveles por /settings/
load_dotenv(os.getenv("ENV_FILE", BASE_DIR / ".env"))  # opcional


def env_bool(name: str, default: bool = False) -> bool:
    """
    Convierte variables de entorno a boolean de forma robusta.
    Acepta: 1/0, true/false, yes/no, on/off, y/n.
    """
    v = os.getenv(name)
    if v is None:
        return default

    s = str(v).strip().lower()

    if s in ("0", "false", "no", "n", "off", ""):
        return False

    if s in ("1", "true", "yes", "y", "on"):
        return True

    # si viene cualquier otra cosa rara, cae al default
    return default


def env_int(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except (TypeError, ValueError):
        return default


def env_float(name: str, default: float) -> float:
    try:
        return float(os.getenv(name, repr(default)))
    except (TypeError, ValueError):
        return default


def env_list(name: str, default: str) -> list[float]:
    raw = os.getenv(name, default)
    try:
        return [float(p) for p in raw.split(",") if p.strip()]
    except ValueError:
        return [float(p) for p in default.split(",")]


# -----------------------------------------------------------------------------
# Core
# -----------------------------------------------------------------------------
SECRET_KEY = os.getenv("SECRET_KEY", "dev-insecure-secret-key")
DEBUG = env_bool("DEBUG", False)

ALLOWED_HOSTS: list[str] = []


# -----------------------------------------------------------------------------
# Apps (herramienta batch: sin admin, sin vistas, sin middleware)
# -----------------------------------------------------------------------------
INSTALLED_APPS = [
    "common",
    "symbols",
    "fock",
    "calculus",
    "bargmann",
    "diagnostics",
    "core",
]


# -----------------------------------------------------------------------------
# DB (solo para la bitácora de corridas DiagnosticRun)
# -----------------------------------------------------------------------------
DATABASE_URL = os.getenv("DATABASE_URL", f"sqlite:///{BASE_DIR / 'db.sqlite3'}")
DATABASES = {"default": dj_database_url.parse(DATABASE_URL, conn_max_age=600)}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

USE_TZ = True
TIME_ZONE = "UTC"


# -----------------------------------------------------------------------------
# Logging
# -----------------------------------------------------------------------------
WEYL_LAB_LOG_LEVEL = os.getenv("WEYL_LAB_LOG_LEVEL", "WARNING").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "simple"},
    },
    "loggers": {
        app: {"handlers": ["console"], "level": WEYL_LAB_LOG_LEVEL, "propagate": False}
        for app in ("common", "symbols", "fock", "calculus", "bargmann", "diagnostics", "core")
    },
}


# -----------------------------------------------------------------------------
# Paralelismo
# -----------------------------------------------------------------------------
# ✅ WEYL_LAB_WORKERS es el fallback; --workers en la CLI lo sobreescribe
WEYL_LAB_WORKERS = max(1, env_int("WEYL_LAB_WORKERS", 1))
# tamaño fijo de bloque: NO depende de la cantidad de workers (determinismo)
WEYL_LAB_CHUNK_POINTS = env_int("WEYL_LAB_CHUNK_POINTS", 250_000)


# -----------------------------------------------------------------------------
# symbol-core
# -----------------------------------------------------------------------------
WEYL_LAB_SUP_POINTS = env_int("WEYL_LAB_SUP_POINTS", 201)
WEYL_LAB_SUP_MAX_POINTS = env_int("WEYL_LAB_SUP_MAX_POINTS", 10_000_000)
WEYL_LAB_L_SCHEDULE = env_list("WEYL_LAB_L_SCHEDULE", "1,10,100,1000")
WEYL_LAB_GROWTH_THRESHOLD = env_float("WEYL_LAB_GROWTH_THRESHOLD", 1.5)
WEYL_LAB_HERMITIAN_TOLERANCE = env_float("WEYL_LAB_HERMITIAN_TOLERANCE", 1e-10)


# -----------------------------------------------------------------------------
# fock-quantization
# -----------------------------------------------------------------------------
WEYL_LAB_N = env_int("WEYL_LAB_N", 32)
WEYL_LAB_MAX_DEGREE = env_int("WEYL_LAB_MAX_DEGREE", 12)
WEYL_LAB_MAX_SHIFT = env_float("WEYL_LAB_MAX_SHIFT", 10.0)
WEYL_LAB_XI_POINTS = env_int("WEYL_LAB_XI_POINTS", 1024)
WEYL_LAB_GRID_TOLERANCE = env_float("WEYL_LAB_GRID_TOLERANCE", 1e-8)
# ✅ duplicar la malla del núcleo en cada cuantización (GridTooCoarse si cambia)
WEYL_LAB_KERNEL_REFINE = env_bool("WEYL_LAB_KERNEL_REFINE", True)
# evaluaciones del símbolo por pasada del núcleo 2-D
WEYL_LAB_KERNEL_MAX_POINTS = env_int("WEYL_LAB_KERNEL_MAX_POINTS", 500_000_000)


# -----------------------------------------------------------------------------
# phase-calculus
# -----------------------------------------------------------------------------
WEYL_LAB_STABILITY_WINDOW = env_float("WEYL_LAB_STABILITY_WINDOW", 1.2)
WEYL_LAB_REFINEMENT_TOLERANCE = env_float("WEYL_LAB_REFINEMENT_TOLERANCE", 0.05)
WEYL_LAB_SHIFT_MAGNITUDES = env_list("WEYL_LAB_SHIFT_MAGNITUDES", "1,2,4,8")
WEYL_LAB_OSCILLATION_N = env_int("WEYL_LAB_OSCILLATION_N", 32)
WEYL_LAB_OSCILLATION_M = env_int("WEYL_LAB_OSCILLATION_M", 16)


# -----------------------------------------------------------------------------
# bargmann-toeplitz
# -----------------------------------------------------------------------------
# tiempo calibrado del núcleo (pi t)^-d exp(-|u|^2 / t): varianza 1/2 por coordenada
WEYL_LAB_HEAT_TIME = env_float("WEYL_LAB_HEAT_TIME", 1.0)


# -----------------------------------------------------------------------------
# esa-diagnostics
# -----------------------------------------------------------------------------
WEYL_LAB_PLATEAU_TOLERANCE = env_float("WEYL_LAB_PLATEAU_TOLERANCE", 0.02)
WEYL_LAB_CV_N_SCHEDULE = [int(v) for v in env_list("WEYL_LAB_CV_N_SCHEDULE", "16,32,64")]
WEYL_LAB_BC_L_SCHEDULE = env_list("WEYL_LAB_BC_L_SCHEDULE", "8,10,12")
WEYL_LAB_BC_GRID = env_int("WEYL_LAB_BC_GRID", 4000)
WEYL_LAB_BC_LEVELS = env_int("WEYL_LAB_BC_LEVELS", 5)
WEYL_LAB_BC_FAIL_DISCREPANCY = env_float("WEYL_LAB_BC_FAIL_DISCREPANCY", 0.1)
WEYL_LAB_BC_PASS_DISCREPANCY = env_float("WEYL_LAB_BC_PASS_DISCREPANCY", 1e-6)
WEYL_LAB_MNORM_TOLERANCE = env_float("WEYL_LAB_MNORM_TOLERANCE", 0.05)
WEYL_LAB_BC_GRID_TOLERANCE = env_float("WEYL_LAB_BC_GRID_TOLERANCE", 1e-2)
WEYL_LAB_MNORM_HALF_WIDTH = env_float("WEYL_LAB_MNORM_HALF_WIDTH", 8.0)
WEYL_LAB_MNORM_SPACING = env_float("WEYL_LAB_MNORM_SPACING", 0.125)
WEYL_LAB_MNORM_MAX_WORK = env_int("WEYL_LAB_MNORM_MAX_WORK", 100_000_000)

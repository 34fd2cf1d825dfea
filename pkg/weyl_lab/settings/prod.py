# weyl_lab/settings/prod.py
from .base import *  # noqa

DEBUG = False

# En corridas batch (CI / scripts) no se usa la clave por defecto
if SECRET_KEY == "dev-insecure-secret-key":
    SECRET_KEY = os.getenv("SECRET_KEY", "weyl-lab-batch")

# Más trabajadores si la máquina lo permite, pero siempre con el mismo
# tamaño de bloque (los artefactos son idénticos byte a byte).
WEYL_LAB_WORKERS = max(1, env_int("WEYL_LAB_WORKERS", os.cpu_count() or 1))

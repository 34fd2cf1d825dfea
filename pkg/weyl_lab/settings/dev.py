# weyl_lab/settings/dev.py
from .base import *  # noqa

# -----------------------------------------------------------------------------
# DEV
# -----------------------------------------------------------------------------
DEBUG = True

# 🔥 En desarrollo queremos ver las decisiones numéricas (clamps, veredictos)
for _logger in LOGGING["loggers"].values():
    _logger["level"] = os.getenv("WEYL_LAB_LOG_LEVEL", "INFO").upper()

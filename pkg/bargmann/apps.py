from django.apps import AppConfig


class BargmannConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "bargmann"
    verbose_name = "Bargmann y Toeplitz"

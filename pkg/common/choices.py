# common/choices.py
from django.db import models


class Verdict(models.TextChoices):
    PASS = "PASS", "Aprobado"
    FAIL = "FAIL", "Rechazado"
    INCONCLUSIVE = "INCONCLUSIVE", "No concluyente"


class Growth(models.TextChoices):
    BOUNDED = "BOUNDED", "Acotado"
    GROWING = "GROWING", "Creciente"
    INCONCLUSIVE = "INCONCLUSIVE", "No concluyente"


class Method(models.TextChoices):
    MONOMIAL = "MONOMIAL", "Simetrización de monomios"
    KERNEL_QUADRATURE = "KERNEL_QUADRATURE", "Cuadratura del núcleo"
    EXPONENTIAL = "EXPONENTIAL", "Exponencial de matriz"
    COMMUTATOR = "COMMUTATOR", "Conmutador"
    TOEPLITZ = "TOEPLITZ", "Toeplitz"
    TOEPLITZ_SYMBOL = "TOEPLITZ_SYMBOL", "Toeplitz vía transformada de calor"


class QuantizeMethod(models.TextChoices):
    AUTO = "AUTO", "Automático"
    MONOMIAL = "MONOMIAL", "Monomios"
    KERNEL = "KERNEL", "Núcleo"


class BoundaryCondition(models.TextChoices):
    DIRICHLET = "DIRICHLET", "Dirichlet"
    NEUMANN = "NEUMANN", "Neumann"

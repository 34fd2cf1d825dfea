# bargmann/heat.py
"""
Transformada de calor de símbolos.

Núcleo calibrado sobre R^{2d}:

    g_t(u) = (π t)^{-d} exp(-|u|^2 / t)      (varianza t/2 por coordenada)

con t* = WEYL_LAB_HEAT_TIME (1.0 por defecto): con ese tiempo
op(heat(f)) coincide con el operador de Toeplitz de f.

Tres caminos:
  - polinomios: forma cerrada por momentos gaussianos (exacta);
  - SymbolExpr general: HeatTransformed, evaluable por cuadratura de
    Gauss-Hermite tensorial;
  - SampledSymbol: convolución en malla (scipy.ndimage.gaussian_filter).
"""
from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import sympy
from django.conf import settings
from scipy.ndimage import gaussian_filter

from common.choices import Method
from common.exceptions import BoxTooSmall, CostGuard, DimensionMismatch, InvalidConfig, NonFinite
from common.utils import write_json
from fock.matrices import METHOD_CODES, pack_binary, unpack_binary
from symbols.expr import MatrixSymbol, PhasePoint, SymbolExpr, as_sympy_number

logger = logging.getLogger(__name__)

FILTER_TRUNCATE = 10.0


def heat_time(t: float | None = None) -> float:
    t = float(t if t is not None else getattr(settings, "WEYL_LAB_HEAT_TIME", 1.0))
    if t <= 0:
        raise InvalidConfig(f"el tiempo de calor debe ser positivo (t={t})")
    return t


# -----------------------------------------------------------------------------
# Forma cerrada para polinomios
# -----------------------------------------------------------------------------
def gaussian_moment(k: int, t) -> sympy.Expr:
    """E[U^k] con U ~ N(0, t/2): 0 si k es impar, (k-1)!! (t/2)^{k/2} si es par."""
    if k % 2:
        return sympy.Integer(0)
    return sympy.factorial2(k - 1) * (t / 2) ** (k // 2) if k else sympy.Integer(1)


def _heat_polynomial_expr(f: SymbolExpr, t: float) -> sympy.Expr:
    variables = f.variables
    offsets = sympy.symbols(f"u0:{len(variables)}", real=True)
    t_exact = as_sympy_number(t)
    moved = sympy.expand(f.expr.xreplace({v: v + u for v, u in zip(variables, offsets)}))
    poly = sympy.Poly(moved, *offsets)
    out = sympy.Integer(0)
    for powers, coeff in poly.terms():
        weight = sympy.Integer(1)
        for p in powers:
            weight *= gaussian_moment(p, t_exact)
            if weight == 0:
                break
        out += coeff * weight
    return sympy.expand(out)


def heat_polynomial(f: SymbolExpr | MatrixSymbol, t: float | None = None) -> SymbolExpr | MatrixSymbol:
    t = heat_time(t)
    if not f.is_polynomial():
        raise ValueError("la forma cerrada solo aplica a polinomios")
    if isinstance(f, MatrixSymbol):
        return f._map(lambda e: SymbolExpr(_heat_polynomial_expr(e, t), e.d))
    return SymbolExpr(_heat_polynomial_expr(f, t), f.d)


# -----------------------------------------------------------------------------
# Símbolo transformado evaluable por cuadratura
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class HeatTransformed:
    source: SymbolExpr | MatrixSymbol
    t: float
    order: int = 16

    @property
    def d(self) -> int:
        return self.source.d

    @property
    def k(self) -> int:
        return getattr(self.source, "k", 1)

    def _nodes(self):
        y, w = np.polynomial.hermite.hermgauss(self.order)
        y = y * math.sqrt(self.t)
        w = w / math.sqrt(math.pi)
        dim = 2 * self.d
        for idx in itertools.product(range(self.order), repeat=dim):
            yield y[list(idx)], float(np.prod(w[list(idx)]))

    def evaluate_grid(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        acc = None
        for offset, weight in self._nodes():
            values = weight * self.source.evaluate_grid(pts + offset)
            acc = values if acc is None else acc + values
        return acc

    def evaluate(self, z):
        z = z if isinstance(z, PhasePoint) else PhasePoint.of(z)
        values = self.evaluate_grid(z.as_array())
        return values if values.ndim else complex(values)

    def is_polynomial(self) -> bool:
        return False

    def to_text(self) -> str:
        return f"heat({self.source.to_text()}, t={self.t!r})"


# -----------------------------------------------------------------------------
# Símbolos muestreados
# -----------------------------------------------------------------------------
def _is_pow2(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


@dataclass(frozen=True, eq=False)
class SampledSymbol:
    """Nodos -R + i 2R/n, i = 0..n-1, por eje de R^{2d}."""

    R: float
    n: int
    d: int
    values: np.ndarray
    source: SymbolExpr | MatrixSymbol | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not _is_pow2(self.n):
            raise DimensionMismatch(f"el tamaño de malla debe ser potencia de dos (n={self.n})")
        if self.R <= 0:
            raise DimensionMismatch("R debe ser positivo")
        values = np.asarray(self.values, dtype=complex)
        if values.shape[: 2 * self.d] != (self.n,) * (2 * self.d):
            raise DimensionMismatch(f"forma {values.shape} no corresponde a n={self.n}, d={self.d}")
        if not np.all(np.isfinite(values)):
            raise NonFinite(None, "valores no finitos en el símbolo muestreado")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return self.values.shape[-1] if self.values.ndim > 2 * self.d else 1

    @property
    def spacing(self) -> float:
        return 2.0 * self.R / self.n

    @property
    def axis(self) -> np.ndarray:
        return -self.R + self.spacing * np.arange(self.n)

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*[self.axis] * (2 * self.d), indexing="ij")
        return np.stack(mesh, axis=-1)

    @classmethod
    def from_symbol(cls, f, R: float, n: int) -> "SampledSymbol":
        grid = cls(R, n, f.d, np.zeros((n,) * (2 * f.d)))
        return cls(R, n, f.d, f.evaluate_grid(grid.points()), source=f)

    def scaled(self, c: complex) -> "SampledSymbol":
        return SampledSymbol(self.R, self.n, self.d, self.values * c, None, dict(self.metadata))

    # -- serialización: formato binario de FockMatrix + sidecar JSON -----------
    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        blob = pack_binary(self.values.ravel(), self.n, self.d, self.k, METHOD_CODES[Method.TOEPLITZ_SYMBOL])
        path.write_bytes(blob)
        write_json(
            path.with_name(path.name + ".config.json"),
            {
                "R": self.R,
                "n": self.n,
                "d": self.d,
                "k": self.k,
                "spacing": self.spacing,
                "source": None if self.source is None else self.source.to_text(),
                **self.metadata,
            },
        )
        return path

    @classmethod
    def load(cls, path) -> "SampledSymbol":
        path = Path(path)
        n, d, k, code, values = unpack_binary(path.read_bytes())
        if code != METHOD_CODES[Method.TOEPLITZ_SYMBOL]:
            raise InvalidConfig(f"el archivo no contiene un símbolo muestreado (código {code})")
        sidecar = json.loads(path.with_name(path.name + ".config.json").read_text(encoding="utf-8"))
        shape = (n,) * (2 * d) + ((k, k) if k > 1 else ())
        meta = {key: v for key, v in sidecar.items() if key not in {"R", "n", "d", "k", "spacing", "source"}}
        return cls(float(sidecar["R"]), n, d, values.reshape(shape), None, meta)


def _filter(values: np.ndarray, d: int, sigma: float, mode: str) -> np.ndarray:
    sigmas = [sigma] * (2 * d) + [0.0] * (values.ndim - 2 * d)
    real = gaussian_filter(values.real, sigmas, mode=mode, truncate=FILTER_TRUNCATE)
    imag = gaussian_filter(values.imag, sigmas, mode=mode, truncate=FILTER_TRUNCATE)
    return real + 1j * imag


def _heat_sampled(s: SampledSymbol, t: float, tolerance: float) -> SampledSymbol:
    sigma = math.sqrt(t / 2.0) / s.spacing
    scale = max(1.0, float(np.max(np.abs(s.values)))) if s.values.size else 1.0

    if s.source is not None:
        # el resultado se toma del centro de cajas 2R y 4R: si difieren, la caja no alcanza
        max_points = int(getattr(settings, "WEYL_LAB_SUP_MAX_POINTS", 10_000_000))
        if (4 * s.n) ** (2 * s.d) > max_points:
            raise CostGuard(f"malla ampliada de {(4 * s.n) ** (2 * s.d)} nodos excede {max_points}")
        results = []
        for factor in (2, 4):
            big = SampledSymbol.from_symbol(s.source, factor * s.R, factor * s.n)
            conv = _filter(big.values, s.d, sigma, "nearest")
            lo = (factor - 1) * s.n // 2
            center = tuple(slice(lo, lo + s.n) for _ in range(2 * s.d))
            results.append(conv[center])
        change = float(np.max(np.abs(results[0] - results[1])))
        values = results[0]
    else:
        values = _filter(s.values, s.d, sigma, "nearest")
        change = float(np.max(np.abs(values - _filter(s.values, s.d, sigma, "reflect"))))

    logger.info("heat_transform muestreado: cambio por ampliación %.3e", change)
    if change > tolerance * scale:
        raise BoxTooSmall(f"los valores en el borde cambian {change:.3e} al ampliar la caja (R={s.R})")
    return SampledSymbol(s.R, s.n, s.d, values, None, {**s.metadata, "t": t})


def heat_transform(f, t: float | None = None, tolerance: float = 1e-6, order: int = 16):
    """
    SymbolExpr/MatrixSymbol polinomial -> forma cerrada;
    SymbolExpr general -> HeatTransformed; SampledSymbol -> SampledSymbol.
    """
    t = heat_time(t)
    if isinstance(f, SampledSymbol):
        return _heat_sampled(f, t, tolerance)
    if f.is_polynomial():
        return heat_polynomial(f, t)
    return HeatTransformed(f, t, order)

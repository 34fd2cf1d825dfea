# common/parallel.py
"""
Paralelismo determinista.

Regla: el tamaño de los bloques lo decide quien llama (o la configuración),
nunca la cantidad de workers. joblib devuelve los resultados en el orden de
entrada, así que cualquier reducción posterior es idéntica bit a bit.
"""
from __future__ import annotations

import logging
from typing import Callable, Iterable, Sequence, TypeVar

from django.conf import settings
from joblib import Parallel, delayed

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

_override_workers: int | None = None


def set_workers(n: int | None) -> None:
    """La CLI fija aquí el límite global (--workers)."""
    global _override_workers
    _override_workers = None if n is None else max(1, int(n))


def get_workers() -> int:
    if _override_workers is not None:
        return _override_workers
    return max(1, int(getattr(settings, "WEYL_LAB_WORKERS", 1)))


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    items = list(items)
    workers = get_workers()
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]

    logger.debug("ordered_map: %d tareas, %d workers", len(items), workers)
    with Parallel(n_jobs=workers, prefer="threads") as parallel:
        return list(parallel(delayed(fn)(it) for it in items))


def chunk_slices(total: int, chunk: int | None = None) -> Sequence[slice]:
    chunk = int(chunk or getattr(settings, "WEYL_LAB_CHUNK_POINTS", 250_000))
    chunk = max(1, chunk)
    return [slice(i, min(i + chunk, total)) for i in range(0, total, chunk)]

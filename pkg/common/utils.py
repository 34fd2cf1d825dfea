# common/utils.py
"""Escritura de artefactos reproducibles (JSON/CSV sin marcas de tiempo)."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence


def dumps_stable(payload) -> str:
    # sort_keys + separadores fijos => mismo config, mismos bytes
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def write_json(path, payload) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_stable(payload), encoding="utf-8")
    return path


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], config: Mapping | None = None) -> Path:
    """
    CSV con columnas fijas. La configuración efectiva va en un sidecar
    <archivo>.config.json para no ensuciar las filas.
    """
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)

    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])

    if config is not None:
        write_json(path.with_name(path.name + ".config.json"), dict(config))
    return path


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]

"""JSON and CSV helpers with deterministic, lossless formatting."""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .closure import ClosureConfig
from .errors import InvalidInput

CSV_FLOAT = "{:.17g}"


def _plain(obj):
    # numpy scalars and arrays to builtins; floats keep their shortest
    # round-trip repr, which is lossless
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def read_text(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc


def write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_json(path: str | None):
    try:
        return json.loads(read_text(path))
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc.msg}") from exc


def write_json(obj, path: str | None) -> None:
    write_text(dumps(obj), path)


def configs_from_json(data) -> list[ClosureConfig]:
    """A single config object, a list of them, or ``{"configs": [...]}``."""
    if isinstance(data, dict) and "configs" in data:
        data = data["configs"]
    if isinstance(data, dict):
        return [ClosureConfig.from_json(data)]
    if isinstance(data, list):
        return [ClosureConfig.from_json(d) for d in data]
    raise InvalidInput("expected a closure config or a list of them")


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([CSV_FLOAT.format(x) if isinstance(x, (float, np.floating)) else x
                    for x in row])
    return buf.getvalue()

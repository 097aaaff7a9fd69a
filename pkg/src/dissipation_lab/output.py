"""CSV and JSON writers used by every scenario.

Each file starts with a provenance line naming the producing module and
the config hash: a ``#`` comment for CSV, a leading ``_meta`` key for JSON.
Floats go to CSV with 17 significant digits so values round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], producer: str,
              config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        fh.write(f"# producer={producer} config_sha256={config_hash}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and float data of a CSV written by ``write_csv`` (comments skipped)."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    header = [h.strip() for h in lines[0].split(",")]
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=float)
    return header, data.reshape(-1, len(header))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path, payload, producer: str, config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {"_meta": {"producer": producer, "config_sha256": config_hash}}
    if isinstance(payload, dict):
        body.update(_jsonable(payload))
    else:
        body["data"] = _jsonable(payload)
    path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")
    return path

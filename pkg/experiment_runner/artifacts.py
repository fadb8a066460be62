"""CSV and JSON artifact writers with deterministic bytes."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, List, Sequence

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"


def jsonable(obj: Any) -> Any:
    """Plain JSON types; non-finite floats become null / "inf" / "-inf"."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, pd.DataFrame):
        return jsonable(obj.to_dict(orient="list"))
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def csv_text(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


class ArtifactWriter:
    """Writes under one output directory and remembers every file, in order."""

    def __init__(self, out_dir, formats: Sequence[str] = ("csv", "json")):
        self.out_dir = Path(out_dir)
        self.formats = tuple(formats)
        self.files: List[str] = []

    def _path(self, relpath: str) -> Path:
        path = self.out_dir / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        if relpath not in self.files:
            self.files.append(relpath)
        return path

    def write_csv(self, relpath: str, frame: pd.DataFrame) -> str:
        if "csv" not in self.formats:
            return ""
        self._path(relpath).write_bytes(csv_text(frame).encode("utf-8"))
        return relpath

    def write_json(self, relpath: str, payload: Any, always: bool = False) -> str:
        if "json" not in self.formats and not always:
            return ""
        self._path(relpath).write_bytes(dumps(payload).encode("utf-8"))
        return relpath

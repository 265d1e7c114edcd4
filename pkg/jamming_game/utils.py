import json
import math
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import yaml
from pydantic import BaseModel

SIGNIFICANT_DIGITS = 17
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"


def env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    return int(value) if value else default


def default_workers() -> int:
    return max(1, env_int("JAMMING_GAME_WORKERS", 1))


def default_block_size() -> int:
    return max(1, env_int("JAMMING_GAME_BLOCK_SIZE", 65536))


def progress_enabled() -> bool:
    return os.environ.get("JAMMING_GAME_PROGRESS") == "true"


def chunk_bounds(length: int, parts: int) -> List[Tuple[int, int]]:
    """Split range(length) into at most `parts` contiguous (start, stop) pairs."""
    parts = max(1, min(parts, length)) if length else 1
    edges = np.linspace(0, length, parts + 1).astype(int)
    return [(int(start), int(stop)) for start, stop in zip(edges[:-1], edges[1:])]


def convert_to_dict(obj):
    if isinstance(obj, BaseModel):
        return convert_to_dict(obj.model_dump())
    if isinstance(obj, dict):
        return {k: convert_to_dict(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [convert_to_dict(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [convert_to_dict(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def load_document(path: str) -> Dict[str, Any]:
    """Read a JSON scenario/covariance file, or YAML when the suffix says so."""
    with open(path, "r", encoding="utf-8") as f:
        if path.endswith((".yaml", ".yml")):
            return yaml.safe_load(f)
        return json.load(f)


def _format_number(value: float) -> str:
    if not math.isfinite(value):
        # JSON has no literal for these; keep them parseable by Python's json module
        return "NaN" if math.isnan(value) else ("Infinity" if value > 0 else "-Infinity")
    text = format(value, f".{SIGNIFICANT_DIGITS}g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Serialize reports to JSON with every float written at 17 significant digits."""
    obj = convert_to_dict(obj) if _level == 0 else obj
    pad = " " * (indent * (_level + 1))
    close = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, float):
        return _format_number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def vector_columns(prefix: str, vector, frame_dict: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Expand a vector into prefix_0, prefix_1, ... columns."""
    frame_dict = {} if frame_dict is None else frame_dict
    for idx, value in enumerate(vector):
        frame_dict[f"{prefix}_{idx}"] = value
    return frame_dict


def write_output(text: str, out: Optional[str] = None):
    if not out or out == "-" or out == "stdout":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(text if text.endswith("\n") else text + "\n")

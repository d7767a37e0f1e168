from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np
import pandas as pd

from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import ConcentrationError, InputError


def matrix_to_literal(matrix: np.ndarray) -> dict:
    """JSON matrix literal ``{"dim", "re", "im"}`` for a square complex matrix."""
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"matrix literal needs a square matrix, got shape {arr.shape}")
    return {"dim": int(arr.shape[0]), "re": arr.real.tolist(), "im": arr.imag.tolist()}


def literal_to_matrix(literal: Mapping[str, Any]) -> np.ndarray:
    try:
        dim = int(literal["dim"])
        re = np.asarray(literal["re"], dtype=float)
        im = np.asarray(literal.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError("Malformed matrix literal", e) from e
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise InputError(f"matrix literal declares dim={dim} but carries shapes {re.shape} / {im.shape}")
    return re + 1j * im


def read_matrix_literal(path: str | Path) -> np.ndarray:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            literal = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        log.error("Failed to read matrix literal", path=str(path), error=str(e))
        raise InputError(f"Cannot read matrix literal from {path}", e) from e
    return literal_to_matrix(literal)


def write_matrix_literal(matrix: np.ndarray, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(matrix_to_literal(matrix), f)
    return path


def to_jsonable(value: Any) -> Any:
    """Plain JSON values: numpy scalars and arrays unwrapped, non-finite floats as null."""
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, (np.complexfloating, complex)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    return value


def dumps_report(data: Mapping[str, Any]) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(data: Mapping[str, Any], path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_report(data), encoding="utf-8")
    except OSError as e:
        log.error("Failed to write report", path=str(path), error=str(e))
        raise ConcentrationError(f"Cannot write report to {path}", e) from e
    log.info("Report written", path=str(path), format="json")
    return path


def records_frame(records: Iterable[Mapping[str, Any]]) -> pd.DataFrame:
    """Flatten per-point records (nested dicts become dotted columns)."""
    return pd.json_normalize(list(records), sep=".")


def write_csv(records: Iterable[Mapping[str, Any]], path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        records_frame(records).to_csv(path, index=False)
    except OSError as e:
        log.error("Failed to write CSV", path=str(path), error=str(e))
        raise ConcentrationError(f"Cannot write CSV to {path}", e) from e
    log.info("Report written", path=str(path), format="csv")
    return path

"""Result rows, CSV serialization, and the error metric for regression cells."""
from __future__ import annotations

import csv
import hashlib
import os
from dataclasses import asdict, dataclass, fields
from typing import Iterable, List

import numpy as np

from .errors import InvalidArgumentError

MAPE_FLOOR = 1e-8


def mape(pred: np.ndarray, actual: np.ndarray) -> float:
    """mean(|pred - actual| / max(|actual|, floor)); the floor guards zeros."""
    pred = np.asarray(pred, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if pred.shape != actual.shape:
        raise InvalidArgumentError("pred and actual must have equal length")
    denom = np.maximum(np.abs(actual), MAPE_FLOOR)
    return float(np.mean(np.abs(pred - actual) / denom))


def support_fingerprint(indices) -> str:
    """Stable hash of a sorted index set, for cross-run solution comparison."""
    text = ",".join(str(int(i)) for i in sorted(int(v) for v in indices))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def vector_fingerprint(vec: np.ndarray, decimals: int = 9) -> str:
    rounded = np.round(np.asarray(vec, dtype=np.float64), decimals)
    rounded += 0.0  # normalize -0.0
    return hashlib.sha256(rounded.tobytes()).hexdigest()[:16]


@dataclass
class ResultRow:
    experiment: str
    family: str
    N: int
    p_or_k: int
    sigma: float
    mode: str
    n: int
    seed: int
    master_seconds: float
    oracle_seconds: float
    total_seconds: float
    iterations: int
    objective: float
    metric: float  # MAPE for regression, accuracy for svm, normalized % for sskp
    fingerprint: str


_FIELDS = [f.name for f in fields(ResultRow)]
_FLOAT_FIELDS = {"sigma", "master_seconds", "oracle_seconds", "total_seconds",
                 "objective", "metric"}
_INT_FIELDS = {"N", "p_or_k", "n", "seed", "iterations"}


def write_results_csv(rows: Iterable[ResultRow], path: str) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=_FIELDS)
            writer.writeheader()
            for row in rows:
                writer.writerow(asdict(row))
    except OSError as exc:
        raise OSError(f"writing results to {path}: {exc}") from exc


def read_results_csv(path: str) -> List[ResultRow]:
    out: List[ResultRow] = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for rec in csv.DictReader(fh):
                kwargs = {}
                for name in _FIELDS:
                    raw = rec[name]
                    if name in _FLOAT_FIELDS:
                        kwargs[name] = float(raw)
                    elif name in _INT_FIELDS:
                        kwargs[name] = int(raw)
                    else:
                        kwargs[name] = raw
                out.append(ResultRow(**kwargs))
    except OSError as exc:
        raise OSError(f"reading results from {path}: {exc}") from exc
    return out


def thread_pool_size() -> int:
    env = os.environ.get("SCPKIT_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)

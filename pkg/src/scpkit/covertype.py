"""Forest covertype ingestion: binarized labels, disjoint train/test subsamples."""
from __future__ import annotations

import gzip
import warnings
from typing import Tuple

import numpy as np
import pandas as pd

from .errors import InvalidArgumentError, ParseError
from .problems import SvmData

N_FEATURES = 54
CANONICAL_ROWS = 581012
REPORTED_ROWS = 580012  # a commonly cited count, accepted with a warning
POSITIVE_CLASS = 2


def _read_matrix(path: str) -> np.ndarray:
    try:
        frame = pd.read_csv(path, header=None, dtype=np.float64)
    except Exception as exc:
        raise ParseError(_locate_bad_line(path, exc)) from exc
    if frame.shape[1] != N_FEATURES + 1:
        raise ParseError(f"{path}: expected {N_FEATURES + 1} comma-separated columns, "
                         f"found {frame.shape[1]}")
    matrix = frame.to_numpy()
    if np.isnan(matrix).any():  # pandas pads short rows instead of failing
        raise ParseError(_locate_bad_line(path, ValueError("missing fields")))
    return matrix


def _locate_bad_line(path: str, exc: Exception) -> str:
    opener = gzip.open if str(path).endswith(".gz") else open
    try:
        with opener(path, "rt") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.rstrip("\n").split(",")
                if len(parts) != N_FEATURES + 1:
                    return f"{path}: line {lineno}: expected {N_FEATURES + 1} fields, got {len(parts)}"
                for field in parts:
                    try:
                        float(field)
                    except ValueError:
                        return f"{path}: line {lineno}: non-numeric field {field!r}"
    except OSError:
        pass
    return f"{path}: parse failure ({exc})"


def load_covertype(path: str, seed: int, N: int, C: float = 1e6) -> Tuple[SvmData, SvmData]:
    """Two disjoint uniform subsamples of size N: (train, test).

    Labels map to +1 for cover class 2 and -1 otherwise. Features are used raw.
    """
    raw = _read_matrix(path)
    rows = raw.shape[0]
    if rows == REPORTED_ROWS:
        warnings.warn(f"{path}: {REPORTED_ROWS} rows (the canonical file has {CANONICAL_ROWS})")
    if 2 * N > rows:
        raise InvalidArgumentError(f"need 2N <= {rows} rows for disjoint splits, got N={N}")

    labels = raw[:, -1].astype(np.int64)
    if labels.min() < 1 or labels.max() > 7:
        raise ParseError(f"{path}: cover labels must be coded 1..7")
    X = raw[:, :N_FEATURES]
    y = np.where(labels == POSITIVE_CLASS, 1.0, -1.0)

    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0)))
    pick = rng.choice(rows, size=2 * N, replace=False)
    train_idx = np.sort(pick[:N])
    test_idx = np.sort(pick[N:])
    train = SvmData(X=X[train_idx], y=y[train_idx], C=C)
    test = SvmData(X=X[test_idx], y=y[test_idx], C=C)
    return train, test

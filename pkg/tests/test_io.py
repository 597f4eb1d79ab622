import gzip
import time

import numpy as np
import pytest

from scpkit.covertype import load_covertype
from scpkit.errors import InvalidArgumentError, ParseError
from scpkit.results import (
    ResultRow,
    mape,
    read_results_csv,
    support_fingerprint,
    vector_fingerprint,
    write_results_csv,
)


# --- mape ---------------------------------------------------------------------


def test_mape_exact_match_is_zero():
    v = np.array([1.0, -2.0, 3.5])
    assert mape(v, v) == 0.0


def test_mape_ten_percent():
    actual = np.array([2.0, -4.0, 10.0])
    assert mape(1.1 * actual, actual) == pytest.approx(0.10, abs=1e-12)


def test_mape_matches_direct_formula():
    rng = np.random.default_rng(3)
    pred = rng.normal(size=200)
    actual = rng.normal(size=200)
    ref = np.mean(np.abs(pred - actual) / np.maximum(np.abs(actual), 1e-8))
    assert mape(pred, actual) == pytest.approx(ref, abs=1e-12)


def test_mape_rejects_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        mape(np.ones(3), np.ones(4))


# --- results csv ---------------------------------------------------------------


def make_row(i=0):
    return ResultRow(
        experiment="table1", family="sparsereg", N=1000, p_or_k=50, sigma=0.1,
        mode="stochastic", n=316, seed=i, master_seconds=0.5, oracle_seconds=0.25,
        total_seconds=0.8, iterations=12, objective=1.25, metric=0.044,
        fingerprint=support_fingerprint([3, 1, 2]),
    )


def test_empty_rows_give_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_results_csv([], str(path))
    text = path.read_text()
    assert text.count("\n") == 1
    assert text.startswith("experiment,family,N")


def test_round_trip(tmp_path):
    rows = [make_row(i) for i in range(5)]
    path = tmp_path / "rows.csv"
    write_results_csv(rows, str(path))
    back = read_results_csv(str(path))
    assert back == rows


def test_bulk_write_is_fast(tmp_path):
    rows = [make_row(i) for i in range(10_000)]
    path = tmp_path / "bulk.csv"
    t0 = time.perf_counter()
    write_results_csv(rows, str(path))
    assert time.perf_counter() - t0 < 1.0


def test_write_failure_carries_path():
    with pytest.raises(OSError, match="missing-dir"):
        write_results_csv([make_row()], "/missing-dir/nope/x.csv")


def test_fingerprints_are_order_insensitive():
    assert support_fingerprint([5, 1, 3]) == support_fingerprint([1, 3, 5])
    assert support_fingerprint([1, 2]) != support_fingerprint([1, 3])
    v = np.array([0.5, -0.25])
    assert vector_fingerprint(v) == vector_fingerprint(v + 1e-12)


# --- covertype loader -----------------------------------------------------------


def synth_covertype(path, rows=400, seed=0, gz=False):
    rng = np.random.default_rng(seed)
    feats = rng.integers(0, 4000, size=(rows, 54))
    labels = np.where(rng.random(rows) < 0.489, 2, rng.integers(1, 8, size=rows))
    table = np.hstack([feats, labels[:, None]])
    text = "\n".join(",".join(str(int(v)) for v in row) for row in table) + "\n"
    if gz:
        with gzip.open(path, "wt") as fh:
            fh.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return labels


def test_load_covertype_maps_labels_and_splits_disjoint(tmp_path):
    path = tmp_path / "cov.csv"
    synth_covertype(str(path), rows=400, seed=1)
    train, test = load_covertype(str(path), seed=3, N=150)
    assert train.X.shape == (150, 54) and test.X.shape == (150, 54)
    assert set(np.unique(train.y)) <= {-1.0, 1.0}
    # disjointness: the same feature row cannot appear in both splits
    train_keys = {row.tobytes() for row in train.X}
    test_keys = {row.tobytes() for row in test.X}
    assert not (train_keys & test_keys)


def test_load_covertype_deterministic(tmp_path):
    path = tmp_path / "cov.csv"
    synth_covertype(str(path), rows=300, seed=2)
    a_train, a_test = load_covertype(str(path), seed=9, N=100)
    b_train, b_test = load_covertype(str(path), seed=9, N=100)
    assert np.array_equal(a_train.X, b_train.X)
    assert np.array_equal(a_test.y, b_test.y)


def test_load_covertype_gzip(tmp_path):
    path = tmp_path / "cov.csv.gz"
    synth_covertype(str(path), rows=200, seed=5, gz=True)
    train, _ = load_covertype(str(path), seed=1, N=50)
    assert train.X.shape == (50, 54)


def test_load_covertype_too_small(tmp_path):
    path = tmp_path / "cov.csv"
    synth_covertype(str(path), rows=100, seed=0)
    with pytest.raises(InvalidArgumentError):
        load_covertype(str(path), seed=0, N=60)


def test_load_covertype_malformed_row_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    synth_covertype(str(path), rows=50, seed=0)
    with open(path, "a") as fh:
        fh.write(",".join(["1"] * 30) + "\n")  # short row -> line 51
    with pytest.raises(ParseError, match="51"):
        load_covertype(str(path), seed=0, N=10)


def test_load_covertype_non_numeric_field(tmp_path):
    path = tmp_path / "bad2.csv"
    synth_covertype(str(path), rows=50, seed=0)
    lines = path.read_text().splitlines()
    parts = lines[9].split(",")
    parts[3] = "oak"
    lines[9] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ParseError, match="10"):
        load_covertype(str(path), seed=0, N=10)

import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from decoysync import InvalidConfig, performance_score
from decoysync.config import Config
from decoysync.harness import (CSV_HEADER, SweepRow, SweepSpec, check_size, emit_results,
                               read_results, run_sweep, run_trial)

SMALL = Config(n_alice=20_000, d_max_bins=200, loss_db=0, bcr=0, mu_signal=40.0, mu_decoy=0.0,
               template_mode="binary")


def test_noiseless_trial_succeeds():
    for t in range(20):
        row = run_trial(SMALL, t)
        assert row.success == 1 and row.recovered_offset == row.true_offset
        assert abs(row.true_offset) <= 200


def test_trial_is_deterministic():
    cfg = replace(SMALL, loss_db=20, bcr=1e3, mu_decoy=0.25, mu_signal=0.5)
    assert run_trial(cfg, 3) == run_trial(cfg, 3)
    assert run_trial(cfg, 3).seed != run_trial(cfg, 4).seed
    assert run_trial(cfg, 3).seed != run_trial(cfg, 3, grid_index=1).seed


def test_fixed_offset_respected():
    assert run_trial(replace(SMALL, true_offset=-17), 0).true_offset == -17


def test_single_point_sweep_score_equals_success():
    spec = SweepSpec("channel_loss_db", (0.0,), 1, SMALL)
    res = run_sweep(spec, threads=1)
    assert len(res.rows) == 1 and res.rows[0].score == res.rows[0].success


def test_score_column_matches_performance_score():
    base = replace(SMALL, mu_signal=0.5, mu_decoy=0.25, bcr=1e3, template_mode="intensity")
    spec = SweepSpec("channel_loss_db", (5.0, 25.0, 35.0), 6, base, score_window=4)
    res = run_sweep(spec, threads=1)
    success = [r.success for r in res.rows]
    np.testing.assert_array_equal([r.score for r in res.rows], performance_score(success, 4))
    assert [r.param for r in res.rows] == [5.0] * 6 + [25.0] * 6 + [35.0] * 6
    assert [r.trial for r in res.rows] == list(range(6)) * 3


def test_threads_give_identical_rows():
    spec = SweepSpec("channel_loss_db", (10.0, 30.0), 4,
                     replace(SMALL, mu_signal=0.5, mu_decoy=0.25, bcr=1e3, template_mode="intensity"))
    assert run_sweep(spec, threads=1).rows == run_sweep(spec, threads=3).rows


def test_spec_validation():
    with pytest.raises(InvalidConfig):
        SweepSpec("loss", (1.0,), 1, SMALL)
    with pytest.raises(InvalidConfig):
        SweepSpec("channel_loss_db", (), 1, SMALL)
    with pytest.raises(InvalidConfig):
        SweepSpec("channel_loss_db", (1.0, 1.0), 1, SMALL)
    with pytest.raises(InvalidConfig):
        SweepSpec.from_config(SMALL)


def test_large_guard():
    big = Config(n_alice=2 ** 28)
    with pytest.raises(InvalidConfig, match="allow-large"):
        check_size(big)
    check_size(big, allow_large=True)
    check_size(Config())


def _rows(n):
    gen = np.random.default_rng(0)
    return [SweepRow(param=float(i // 100), trial=i % 100, seed=int(gen.integers(2 ** 63)),
                     true_offset=int(gen.integers(-9, 9)), recovered_offset=0, success=i % 2,
                     sigma=float(gen.standard_normal()), detections=i, score=float(gen.random()))
            for i in range(n)]


def test_emit_csv_single_row(tmp_path):
    p = tmp_path / "one.csv"
    emit_results(_rows(1), "csv", p)
    lines = p.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == ",".join(CSV_HEADER)


def test_csv_round_trip_large(tmp_path):
    rows = _rows(10_000)
    p = tmp_path / "many.csv"
    emit_results(rows, "csv", p)
    with open(p, newline="") as fh:
        assert sum(1 for _ in csv.reader(fh)) == 10_001
    assert read_results(p, "csv") == rows


def test_json_nan_is_null(tmp_path):
    rows = [replace(_rows(1)[0], sigma=float("nan"))]
    p = tmp_path / "r.json"
    emit_results(rows, "json", p)
    data = json.loads(p.read_text())
    assert data[0]["sigma"] is None and list(data[0]) == list(CSV_HEADER)
    back = read_results(p, "json")[0]
    assert np.isnan(back.sigma) and back.seed == rows[0].seed


def test_csv_nan(tmp_path):
    p = tmp_path / "r.csv"
    emit_results([replace(_rows(1)[0], sigma=float("nan"))], "csv", p)
    assert ",nan," in p.read_text()


def test_emit_rejects(tmp_path):
    with pytest.raises(InvalidConfig):
        emit_results([], "csv", tmp_path / "x")
    with pytest.raises(InvalidConfig):
        emit_results(_rows(1), "xml", tmp_path / "x")

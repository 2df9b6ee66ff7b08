"""Seeded Monte-Carlo trials, parameter sweeps and result tables."""

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import rng
from .analysis import PerformanceSeries, detection_count, performance_score
from .channel import apply_dead_time, apply_frequency_offset, simulate_detections
from .config import SWEEPABLE, Config
from .errors import InvalidConfig
from .protocol import generate_states, make_template
from .sync import cross_correlate, recover_frequency_and_offset, recover_offset

CSV_HEADER = ("param", "trial", "seed", "true_offset", "recovered_offset",
              "success", "sigma", "detections", "score")

# desktop memory guard for sweeps; bypass with allow_large
LARGE_RECORD = 2 ** 28


@dataclass(frozen=True)
class SweepRow:
    param: float
    trial: int
    seed: int
    true_offset: int
    recovered_offset: int
    success: int
    sigma: float
    detections: int
    score: float = float("nan")
    recovered_delta_ppm: float = 0.0


@dataclass(frozen=True)
class SweepSpec:
    swept_param: str
    grid: tuple
    trials_per_point: int
    fixed: Config
    base_seed: int = 0
    score_window: int = 100

    def __post_init__(self):
        if self.swept_param not in SWEEPABLE:
            raise InvalidConfig(f"swept_param must be one of {sorted(SWEEPABLE)}, got {self.swept_param!r}")
        if not self.grid:
            raise InvalidConfig("grid must be non-empty")
        diffs = np.diff(np.asarray(self.grid, dtype=float))
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise InvalidConfig("grid must be strictly monotone")
        if self.trials_per_point < 1:
            raise InvalidConfig("trials_per_point must be >= 1")

    @property
    def d_max_bins(self):
        return self.fixed.d_max

    @classmethod
    def from_config(cls, config):
        if config.swept_param is None:
            raise InvalidConfig("config has no swept_param; set it in the [sweep] section")
        return cls(config.swept_param, tuple(config.grid), config.trials_per_point, config,
                   config.base_seed, config.score_window)

    def point_configs(self):
        return [self.fixed.with_param(self.swept_param, v) for v in self.grid]


@dataclass(frozen=True, eq=False)
class SweepResult:
    rows: list
    performance: PerformanceSeries


@dataclass(frozen=True, eq=False)
class TrialData:
    seed: int
    true_offset: int
    template: object
    clicks: object


def prepare_trial(config, trial_index, grid_index=0):
    """Generate states, template and impaired click record for one trial.

    The trial seed is derived from ``(config.base_seed, grid_index,
    trial_index)`` so the outcome does not depend on execution order.
    """
    seed = rng.derive_seed(config.base_seed, grid_index, trial_index)
    d_max = config.d_max
    states = generate_states(config.table(), config.n_alice, rng.derive_seed(seed, rng.STATES))
    template = make_template(states, config.template_mode, config.zero_mean)
    if config.true_offset is None:
        offset_rng = rng.make_rng(rng.derive_seed(seed, rng.OFFSET))
        true_offset = int(offset_rng.integers(-d_max, d_max, endpoint=True))
    else:
        true_offset = int(config.true_offset)
    channel = config.channel()
    clicks = simulate_detections(states, channel, true_offset, d_max, rng.derive_seed(seed, rng.CHANNEL))
    clicks = apply_dead_time(clicks, channel.dead_bins)
    clicks = apply_frequency_offset(clicks, channel.delta_ppm)
    return TrialData(seed, true_offset, template, clicks)


def run_trial(config, trial_index, grid_index=0, param=float("nan")):
    """Simulate one block end to end and score the recovered offset."""
    data = prepare_trial(config, trial_index, grid_index)
    template, clicks, seed, true_offset = data.template, data.clicks, data.seed, data.true_offset
    if config.delta_grid:
        est = recover_frequency_and_offset(template, clicks, config.delta_grid, config.exclusion_halfwidth)
    else:
        corr = cross_correlate(template, clicks, config.method, config.exclusion_halfwidth)
        est = recover_offset(corr)
    return SweepRow(
        param=float(param),
        trial=int(trial_index),
        seed=seed,
        true_offset=true_offset,
        recovered_offset=int(est.offset_bins),
        success=int(est.offset_bins == true_offset),
        sigma=float(est.sigma_multiple),
        detections=detection_count(clicks),
        recovered_delta_ppm=float(est.delta_ppm),
    )


def _workers(threads):
    if not threads:
        return os.cpu_count() or 1
    return int(threads)


def check_size(config, allow_large=False):
    if not allow_large and config.record_length > LARGE_RECORD:
        raise InvalidConfig(
            f"n_alice + 2*d_max = {config.record_length} exceeds 2^28; pass --allow-large to run anyway")


def run_sweep(spec, threads=0, allow_large=False):
    """Run every (grid point, trial) pair and attach the sliding-window score.

    Rows come back in grid order, then trial order, whatever the thread count.
    The score column is the performance score over that flattened sequence.
    """
    configs = [replace(c, base_seed=spec.base_seed) for c in spec.point_configs()]
    for c in configs:
        check_size(c, allow_large)
    tasks = [(configs[g], t, g, v) for g, v in enumerate(spec.grid)
             for t in range(spec.trials_per_point)]

    workers = _workers(threads)
    if workers == 1:
        rows = [run_trial(*task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda task: run_trial(*task), tasks))

    successes = np.array([r.success for r in rows], dtype=bool)
    score = performance_score(successes, spec.score_window)
    rows = [replace(r, score=float(s)) for r, s in zip(rows, score)]
    params = np.array([r.param for r in rows])
    return SweepResult(rows, PerformanceSeries(params, successes, score, spec.score_window))


def _fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _row_record(row):
    return {
        "param": float(row.param),
        "trial": int(row.trial),
        "seed": int(row.seed),
        "true_offset": int(row.true_offset),
        "recovered_offset": int(row.recovered_offset),
        "success": int(row.success),
        "sigma": float(row.sigma),
        "detections": int(row.detections),
        "score": float(row.score),
    }


def emit_results(rows, fmt, path):
    """Write rows as CSV or JSON.

    CSV columns are ``param,trial,seed,true_offset,recovered_offset,success,
    sigma,detections,score``; JSON is an array of objects with those keys.
    Floats use the shortest round-trip representation; NaN is written as
    ``nan`` in CSV and ``null`` in JSON.
    """
    rows = list(rows)
    if not rows:
        raise InvalidConfig("no rows to write")
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in rows:
                rec = _row_record(r)
                w.writerow([_fmt_float(v) if isinstance(v, float) else v for v in rec.values()])
    elif fmt == "json":
        records = []
        for r in rows:
            rec = _row_record(r)
            records.append({k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in rec.items()})
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=1)
            fh.write("\n")
    else:
        raise InvalidConfig(f"unknown output format {fmt!r}; expected csv or json")


def read_results(path, fmt="csv"):
    """Load rows written by :func:`emit_results`."""
    ints = {"trial", "seed", "true_offset", "recovered_offset", "success", "detections"}
    if fmt == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            records = list(reader)
    elif fmt == "json":
        with open(path, encoding="utf-8") as fh:
            records = json.load(fh)
    else:
        raise InvalidConfig(f"unknown output format {fmt!r}")
    rows = []
    for rec in records:
        kw = {}
        for k in CSV_HEADER:
            v = rec[k]
            if k in ints:
                kw[k] = int(v)
            else:
                kw[k] = float("nan") if v is None else float(v)
        rows.append(SweepRow(**kw))
    return rows

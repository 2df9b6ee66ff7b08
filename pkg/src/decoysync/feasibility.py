"""FPGA transform-length and oscillator-syntonization budgets."""

import math
from dataclasses import dataclass, replace

from .channel import click_probability
from .errors import Infeasible, InvalidConfig

LOSS_BRACKET_DB = (0.0, 100.0)
LOSS_TOL_DB = 0.1


@dataclass(frozen=True)
class HardwareBudget:
    max_transform_points: int = 2 ** 27
    rep_rate: float = 2.5e9

    def __post_init__(self):
        if self.max_transform_points < 2:
            raise InvalidConfig("max_transform_points must be >= 2")
        if self.rep_rate <= 0:
            raise InvalidConfig("rep_rate must be > 0")


def max_offset_for_transform(n_alice, budget=HardwareBudget()):
    """Largest clock offset that fits ``n_alice + 2 * d_max`` in one transform.

    Returns ``(d_max_bins, d_max_seconds)``.
    """
    n_alice = int(n_alice)
    if n_alice > budget.max_transform_points:
        raise Infeasible(
            f"block of {n_alice} bins exceeds the {budget.max_transform_points}-point transform")
    d_max = (budget.max_transform_points - n_alice) // 2
    return d_max, d_max / budget.rep_rate


def required_transform_length(n_alice, d_max_bins):
    if n_alice < 0 or d_max_bins < 0:
        raise InvalidConfig("n_alice and d_max_bins must be >= 0")
    return int(n_alice) + 2 * int(d_max_bins)


def syntonization_smear(delta_ppm, n_alice):
    """Bins of peak smear accumulated over a block by a frequency offset."""
    return abs(delta_ppm) * 1e-6 * n_alice


def state_buffer_bytes(latency_s, rep_rate=2.5e9, bits_per_bin=2):
    """Memory Alice needs to hold her states while a report is in flight.

    ``latency_s`` is the total quantum plus classical round-trip latency.
    """
    if latency_s < 0 or rep_rate <= 0 or bits_per_bin <= 0:
        raise InvalidConfig("latency must be >= 0; rep_rate and bits_per_bin > 0")
    return math.ceil(latency_s * rep_rate * bits_per_bin / 8)


def detections_per_bin_shift(table, channel, delta_ppm):
    """Clicks Bob collects while the clocks slip by one bin."""
    p = float(table.probs @ click_probability(table.mus, channel.eta, channel.bcr, channel.t_bin))
    slip_time = channel.t_bin / (delta_ppm * 1e-6)
    return p * channel.rep_rate * slip_time


def arrival_lock_limit(table, channel, delta_ppm, min_detections=10):
    """Can Bob lock his oscillator on photon arrivals, and down to what loss?

    Returns ``(feasible, loss_limit_db)``. ``feasible`` refers to the loss in
    ``channel``. ``loss_limit_db`` is where the detections per one-bin slip
    equal ``min_detections``, found by bisection on [0, 100] dB to 0.1 dB.
    It is NaN when locking fails even without loss and +inf when it still
    works at 100 dB.
    """
    if delta_ppm <= 0:
        raise InvalidConfig(f"delta_ppm must be > 0, got {delta_ppm}")

    def margin(loss_db):
        return detections_per_bin_shift(table, replace(channel, loss_db=loss_db), delta_ppm) - min_detections

    feasible = margin(channel.loss_db) >= 0
    lo, hi = LOSS_BRACKET_DB
    if margin(lo) < 0:
        return feasible, float("nan")
    if margin(hi) >= 0:
        return feasible, float("inf")
    while hi - lo > LOSS_TOL_DB:
        mid = 0.5 * (lo + hi)
        if margin(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return feasible, 0.5 * (lo + hi)

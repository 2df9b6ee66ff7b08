"""Receiver side: per-bin click simulation, dead time and oscillator drift."""

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import InvalidConfig
from .rng import make_rng

_CHUNK = 1 << 22


@dataclass(frozen=True)
class ChannelConfig:
    """Loss, background and timing of the quantum channel.

    ``t_bin`` defaults to 0.4 ns (2.5 GHz repetition).
    """

    loss_db: float = 25.0
    bcr: float = 1e3
    t_bin: float = 4e-10
    dead_bins: int = 0
    delta_ppm: float = 0.0

    def __post_init__(self):
        if self.loss_db < 0:
            raise InvalidConfig(f"loss_db must be >= 0, got {self.loss_db}")
        if self.bcr < 0:
            raise InvalidConfig(f"bcr must be >= 0, got {self.bcr}")
        if self.t_bin <= 0:
            raise InvalidConfig(f"t_bin must be > 0, got {self.t_bin}")
        if self.bcr * self.t_bin >= 1:
            raise InvalidConfig(f"bcr * t_bin = {self.bcr * self.t_bin} must be < 1")
        if self.dead_bins < 0:
            raise InvalidConfig(f"dead_bins must be >= 0, got {self.dead_bins}")
        if abs(self.delta_ppm) > 100:
            raise InvalidConfig(f"|delta_ppm| must be <= 100, got {self.delta_ppm}")

    @property
    def eta(self):
        return 10.0 ** (-self.loss_db / 10.0)

    @property
    def p_background(self):
        return self.bcr * self.t_bin

    @property
    def rep_rate(self):
        return 1.0 / self.t_bin


def click_probability(mu, eta, bcr, t_bin):
    """Probability that a bin carrying mean photon number ``mu`` yields a click.

    ``1 - exp(-mu * eta) * (1 - bcr * t_bin)``; works elementwise on arrays.
    Evaluated as ``-expm1(-mu * eta + log1p(-bcr * t_bin))``, which keeps full
    relative precision for tiny ``mu * eta`` and stays monotone under rounding.
    """
    p_bg = bcr * t_bin
    if np.any(np.asarray(p_bg) >= 1) or np.any(np.asarray(p_bg) < 0):
        raise InvalidConfig(f"bcr * t_bin = {p_bg} must lie in [0, 1)")
    if np.any(np.asarray(mu) < 0):
        raise InvalidConfig("mu must be >= 0")
    if np.any(np.asarray(eta) <= 0) or np.any(np.asarray(eta) > 1):
        raise InvalidConfig(f"eta = {eta} must lie in (0, 1]")
    return -np.expm1(np.log1p(-p_bg) - np.multiply(mu, eta))


@dataclass(frozen=True, eq=False)
class ClickSequence:
    """Bob's padded detection record.

    A click caused by Alice's bin ``i`` lands at index ``i + d_max + true_offset``
    (before any drift is applied). The record is ``n_alice + 2 * d_max`` long.
    """

    clicks: np.ndarray
    d_max: int
    true_offset: int
    seed: int

    def __len__(self):
        return self.clicks.shape[0]

    @property
    def n_alice(self):
        return self.clicks.shape[0] - 2 * self.d_max

    @property
    def indices(self):
        return np.flatnonzero(self.clicks)


def simulate_detections(states, channel, true_offset, d_max, seed):
    """Draw Bob's clicks for Alice's ``states`` through ``channel``.

    Bins outside Alice's shifted window click with the background
    probability only. Dead time and drift are separate steps
    (:func:`apply_dead_time`, :func:`apply_frequency_offset`).
    """
    d_max = int(d_max)
    true_offset = int(true_offset)
    if d_max < 0:
        raise InvalidConfig(f"d_max must be >= 0, got {d_max}")
    if abs(true_offset) > d_max:
        raise InvalidConfig(f"|true_offset| = {abs(true_offset)} exceeds d_max = {d_max}")
    n = len(states)
    total = n + 2 * d_max
    p_bg = channel.p_background
    p_state = click_probability(states.table.mus, channel.eta, channel.bcr, channel.t_bin)
    start = d_max + true_offset

    rng = make_rng(seed)
    clicks = np.empty(total, dtype=np.bool_)
    for lo in range(0, total, _CHUNK):
        hi = min(lo + _CHUNK, total)
        p = np.full(hi - lo, p_bg)
        # overlap of [lo, hi) with Alice's window [start, start + n)
        a, b = max(lo, start), min(hi, start + n)
        if a < b:
            p[a - lo:b - lo] = p_state[states.intensities[a - start:b - start]]
        clicks[lo:hi] = rng.random(hi - lo) < p
    return ClickSequence(clicks, d_max, true_offset, int(seed))


def expected_clicks(states, channel, d_max):
    """Mean click count of :func:`simulate_detections` for these inputs."""
    p_state = click_probability(states.table.mus, channel.eta, channel.bcr, channel.t_bin)
    counts = np.bincount(states.intensities, minlength=len(p_state))
    return float(counts @ p_state + 2 * int(d_max) * channel.p_background)


def apply_dead_time(clicks, dead_bins):
    """Blind the detector for ``dead_bins`` bins after each registered click."""
    dead_bins = int(dead_bins)
    if dead_bins < 0:
        raise InvalidConfig(f"dead_bins must be >= 0, got {dead_bins}")
    if dead_bins == 0:
        return clicks
    return replace(clicks, clicks=_kernels.dead_time(clicks.clicks, dead_bins))


def rescale_indices(idx, factor, length):
    """Map click indices ``j`` to ``round(j * factor)``, merging collisions.

    Indices that land outside ``[0, length)`` are dropped. Rounding is half-up.
    """
    moved = np.floor(np.asarray(idx, dtype=np.float64) * factor + 0.5).astype(np.int64)
    moved = moved[(moved >= 0) & (moved < length)]
    return np.unique(moved)


def apply_frequency_offset(clicks, delta_ppm):
    """Stretch Bob's timeline by ``1 + delta_ppm * 1e-6``.

    A receiver clock running fast by ``delta_ppm`` places the click at index
    ``j`` at ``round(j * (1 + delta_ppm * 1e-6))``.
    """
    if abs(delta_ppm) > 100:
        raise InvalidConfig(f"|delta_ppm| must be <= 100, got {delta_ppm}")
    if delta_ppm == 0:
        return clicks
    n = len(clicks)
    moved = rescale_indices(clicks.indices, 1.0 + delta_ppm * 1e-6, n)
    out = np.zeros(n, dtype=np.bool_)
    out[moved] = True
    return replace(clicks, clicks=out)

"""Evaluation metrics: performance score, detection counts, key-rate cost, QBER."""

from dataclasses import dataclass

import numpy as np

from .channel import click_probability
from .errors import InvalidInput, UndefinedQBER


def _window_kernel(window):
    # Odd windows: plain box of `window` taps. Even windows: box of window+1
    # taps with half weight on both ends, so the window stays centred and
    # still sums to `window`.
    if window % 2:
        return np.ones(window)
    k = np.ones(window + 1)
    k[0] = k[-1] = 0.5
    return k


def performance_score(successes, window=100):
    """Centred sliding-window average of binary trial outcomes.

    Near the ends the window is clipped to the available trials and the
    average is taken over what remains.

    >>> performance_score([1, 1, 0, 1], window=3).tolist()
    [1.0, 0.6666666666666666, 0.6666666666666666, 0.5]
    """
    x = np.asarray(successes, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] == 0:
        raise InvalidInput("successes must be a non-empty 1-D sequence")
    window = int(window)
    if window < 1:
        raise InvalidInput(f"window must be >= 1, got {window}")
    k = _window_kernel(window)
    num = np.convolve(x, k, mode="full")
    den = np.convolve(np.ones_like(x), k, mode="full")
    h = (k.shape[0] - 1) // 2
    n = x.shape[0]
    return np.clip(num[h:h + n] / den[h:h + n], 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class PerformanceSeries:
    param_values: np.ndarray
    successes: np.ndarray
    score: np.ndarray
    window: int = 100

    @classmethod
    def from_outcomes(cls, param_values, successes, window=100):
        s = np.asarray(successes, dtype=bool)
        return cls(np.asarray(param_values, dtype=np.float64), s,
                   performance_score(s, window), int(window))

    def per_point(self):
        """Grid values with the mean success rate and mean score at each."""
        values = np.unique(self.param_values)
        rate = np.array([self.successes[self.param_values == v].mean() for v in values])
        score = np.array([self.score[self.param_values == v].mean() for v in values])
        return values, rate, score


def score_crossing(param_values, scores, level=0.5):
    """First parameter value at which ``scores`` falls through ``level``.

    Linear interpolation between the last grid point at or above ``level``
    and the first one below it. Returns NaN if the curve never crosses.
    """
    p = np.asarray(param_values, dtype=np.float64)
    s = np.asarray(scores, dtype=np.float64)
    for i in range(1, p.shape[0]):
        if s[i - 1] >= level > s[i]:
            frac = (s[i - 1] - level) / (s[i - 1] - s[i])
            return float(p[i - 1] + frac * (p[i] - p[i - 1]))
    return float("nan")


def key_rate_penalty(p_sync, p_detect_sync, dead_bins):
    """Fraction of key given up to bright sync pulses.

    Sync bins carry no key, and each detected sync pulse blinds the detector
    for ``dead_bins`` further bins.
    """
    if p_sync < 0 or p_detect_sync < 0 or dead_bins < 0:
        raise InvalidInput("penalty inputs must be non-negative")
    if p_sync > 1 or p_detect_sync > 1:
        raise InvalidInput("probabilities must be <= 1")
    return p_sync + p_sync * p_detect_sync * dead_bins


def qber_estimate(channel, table):
    """Auxiliary QBER model: background clicks are wrong half the time.

    ``0.5 * p_bg / (p_det + p_bg)`` with ``p_bg = bcr * t_bin`` and
    ``p_det`` the table-averaged signal click probability without background.
    This is a plug-in estimate, not a reproduction of any published QBER.
    """
    p_bg = channel.p_background
    p_det = float(table.probs @ click_probability(table.mus, channel.eta, 0.0, channel.t_bin))
    if p_det + p_bg == 0:
        raise UndefinedQBER("no signal or background clicks possible")
    return 0.5 * p_bg / (p_det + p_bg)


def detection_count(clicks):
    return int(np.count_nonzero(getattr(clicks, "clicks", clicks)))

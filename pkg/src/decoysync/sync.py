"""Clock offset and frequency recovery by valid-mode cross-correlation.

The correlation at lag ``n`` is ``sum_m t[m] * b[m + d_max + n]`` for
``n = -d_max .. d_max``, where ``t`` is Alice's template and ``b`` is Bob's
padded click record. Only positions where both sequences hold data take
part, so there is no wrap-around and no partial overlap.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .channel import rescale_indices
from .errors import DegenerateSeries, InvalidConfig, InvalidInput

DEFAULT_EXCLUSION = 2


def next_pow2(n):
    return 1 << max(0, int(n) - 1).bit_length()


def _as_values(template):
    return np.asarray(getattr(template, "values", template), dtype=np.float64)


def _as_clicks(clicks):
    return np.asarray(getattr(clicks, "clicks", clicks))


def _lag_window(n_template, n_clicks):
    extra = n_clicks - n_template
    if extra < 0 or extra % 2:
        raise InvalidInput(
            f"click record length {n_clicks} must equal template length {n_template} + 2*d_max")
    return extra // 2


class FFTCorrelator:
    """Valid-mode correlator that caches the template spectrum.

    The transform length is the next power of two at or above
    ``len(clicks) + len(template) - 1``, which makes the linear correlation
    free of circular wrap. Reusing one instance across many click records of
    the same length (as the frequency search does) skips the template FFT.
    """

    def __init__(self, template, d_max):
        self.template = _as_values(template)
        self.d_max = int(d_max)
        n = self.template.shape[0]
        self.n_clicks = n + 2 * self.d_max
        self.nfft = next_pow2(self.n_clicks + n - 1)
        self._conj_spec = np.conj(np.fft.rfft(self.template, self.nfft))

    def __call__(self, clicks):
        b = np.asarray(clicks, dtype=np.float64)
        if b.shape[0] != self.n_clicks:
            raise InvalidInput(f"expected {self.n_clicks} click bins, got {b.shape[0]}")
        full = np.fft.irfft(np.fft.rfft(b, self.nfft) * self._conj_spec, self.nfft)
        return full[:2 * self.d_max + 1]


@dataclass(frozen=True, eq=False)
class CorrelationSeries:
    """Correlation value per lag with peak statistics.

    ``mean`` and ``std`` are taken over all lags except those within
    ``exclusion`` bins of the peak; for windows too small for that they fall
    back to all lags. ``sigma_multiple`` is NaN when ``std`` is zero.
    """

    values: np.ndarray
    d_max: int
    exclusion: int = DEFAULT_EXCLUSION

    @cached_property
    def lags(self):
        return np.arange(-self.d_max, self.d_max + 1)

    @cached_property
    def peak_index(self):
        # np.argmax returns the first maximum, i.e. the smallest lag on ties
        return int(np.argmax(self.values))

    @property
    def peak_lag(self):
        return self.peak_index - self.d_max

    @property
    def peak_value(self):
        return float(self.values[self.peak_index])

    @cached_property
    def _rest(self):
        if _enough_lags(self.values.shape[0], self.exclusion):
            return _excluded(self.values, self.peak_index, self.exclusion)
        return self.values

    @property
    def mean(self):
        return float(self._rest.mean())

    @property
    def std(self):
        return float(self._rest.std())

    @property
    def sigma_multiple(self):
        std = self.std
        if std == 0:
            return float("nan")
        return (self.peak_value - self.mean) / std


def _enough_lags(n_lags, exclusion):
    return n_lags > 2 * exclusion + 10


def _excluded(values, peak, halfwidth):
    mask = np.ones(values.shape[0], dtype=bool)
    mask[max(0, peak - halfwidth):peak + halfwidth + 1] = False
    return values[mask]


@dataclass(frozen=True)
class SyncEstimate:
    offset_bins: int
    freq_factor: float
    sigma_multiple: float
    success: bool | None = None

    @property
    def delta_ppm(self):
        return (self.freq_factor - 1.0) * 1e6


def cross_correlate(template, clicks, method="fft", exclusion=DEFAULT_EXCLUSION):
    """Valid-mode cross-correlation of a template against a click record.

    Parameters
    ----------
    template : Template or array_like
        Alice's template, length ``n_alice``.
    clicks : ClickSequence or array_like
        Bob's padded record, length ``n_alice + 2 * d_max``.
    method : {"fft", "direct", "sparse"}
        ``fft`` is the zero-padded transform; ``direct`` is the O(N * lags)
        dot-product loop; ``sparse`` sums template values at click positions
        and needs a 0/1 click record.

    Returns
    -------
    CorrelationSeries
    """
    t = _as_values(template)
    b = _as_clicks(clicks)
    d_max = _lag_window(t.shape[0], b.shape[0])
    if method == "fft":
        values = FFTCorrelator(t, d_max)(b)
    elif method == "direct":
        values = _kernels.direct_correlation(t, b, d_max)
    elif method == "sparse":
        values = _kernels.sparse_correlation(t, np.flatnonzero(b), d_max)
    else:
        raise InvalidConfig(f"unknown correlation method {method!r}")
    return CorrelationSeries(values, d_max, exclusion)


def recover_offset(corr):
    """Clock offset at the correlation maximum (smallest lag on ties)."""
    return SyncEstimate(corr.peak_lag, 1.0, corr.sigma_multiple)


def peak_significance(corr, exclusion_halfwidth=DEFAULT_EXCLUSION):
    """Height of the peak above the off-peak mean, in off-peak standard deviations.

    Raises
    ------
    InvalidInput
        If there are not more than ``2 * exclusion_halfwidth + 10`` lags.
    DegenerateSeries
        If the off-peak values have zero spread.
    """
    values = np.asarray(getattr(corr, "values", corr), dtype=np.float64)
    if not _enough_lags(values.shape[0], exclusion_halfwidth):
        raise InvalidInput(
            f"{values.shape[0]} lags is too few for exclusion half-width {exclusion_halfwidth}")
    peak = int(np.argmax(values))
    rest = _excluded(values, peak, exclusion_halfwidth)
    std = rest.std()
    if std == 0:
        raise DegenerateSeries("correlation has zero spread away from the peak")
    return float((values[peak] - rest.mean()) / std)


def recover_frequency_and_offset(template, clicks, delta_grid, exclusion=DEFAULT_EXCLUSION):
    """Search a grid of frequency offsets (ppm) and the clock offset jointly.

    For each candidate ``delta`` the click indices are rescaled by
    ``1 / (1 + delta * 1e-6)``, undoing a receiver clock that runs fast by
    ``delta``, and correlated against the template. The candidate with the
    highest peak wins; ties go to smaller ``|delta|``, then to the smaller lag.
    """
    grid = [float(x) for x in delta_grid]
    if not grid:
        raise InvalidConfig("delta_grid must not be empty")
    if 0.0 not in grid:
        raise InvalidConfig("delta_grid must contain 0")
    t = _as_values(template)
    b = _as_clicks(clicks)
    d_max = _lag_window(t.shape[0], b.shape[0])
    correlate = FFTCorrelator(t, d_max)
    idx = np.flatnonzero(b)

    best = None
    for delta in sorted(set(grid), key=lambda x: (abs(x), x)):
        if delta == 0.0:
            resampled = b
        else:
            resampled = np.zeros(b.shape[0], dtype=np.float64)
            resampled[rescale_indices(idx, 1.0 / (1.0 + delta * 1e-6), b.shape[0])] = 1.0
        corr = CorrelationSeries(correlate(resampled), d_max, exclusion)
        key = (-corr.peak_value, abs(delta), corr.peak_lag)
        if best is None or key < best[0]:
            best = (key, delta, corr)
    _, delta, corr = best
    return SyncEstimate(corr.peak_lag, 1.0 + delta * 1e-6, corr.sigma_multiple)

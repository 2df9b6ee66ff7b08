"""Inner loops with a numba path and a pure-numpy path.

The numba versions are used when numba imports cleanly and the
environment variable ``DECOYSYNC_DISABLE_NUMBA`` is unset (or ``0``).
Both paths are always importable under explicit names so tests and the
benchmark can compare them directly.
"""

import os

import numpy as np

_DISABLE = os.environ.get("DECOYSYNC_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAS_NUMBA = False


# --------------------------------------------------------------------------
# dead time
# --------------------------------------------------------------------------

def dead_time_numpy(clicks, dead_bins):
    """Clear clicks falling within ``dead_bins`` after each surviving click."""
    out = np.zeros(clicks.shape[0], dtype=np.bool_)
    idx = np.flatnonzero(clicks)
    if dead_bins <= 0:
        out[idx] = True
        return out
    next_free = -1
    for j in idx.tolist():
        if j >= next_free:
            out[j] = True
            next_free = j + dead_bins + 1
    return out


def _dead_time_loop(clicks, dead_bins):
    n = clicks.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    blind = 0
    for j in range(n):
        if blind > 0:
            blind -= 1
        elif clicks[j]:
            out[j] = True
            blind = dead_bins
    return out


# --------------------------------------------------------------------------
# direct (dense) valid-mode correlation, O(n_alice * lags)
# --------------------------------------------------------------------------

def direct_correlation_numpy(template, signal, d_max):
    n = template.shape[0]
    lags = 2 * d_max + 1
    out = np.empty(lags, dtype=np.float64)
    for k in range(lags):
        out[k] = np.dot(template, signal[k:k + n])
    return out


def _direct_correlation_loop(template, signal, d_max):
    n = template.shape[0]
    lags = 2 * d_max + 1
    out = np.empty(lags, dtype=np.float64)
    for k in range(lags):
        acc = 0.0
        for m in range(n):
            acc += template[m] * signal[k + m]
        out[k] = acc
    return out


# --------------------------------------------------------------------------
# sparse valid-mode correlation, O(clicks * lags)
# --------------------------------------------------------------------------

def sparse_correlation_numpy(template, click_idx, d_max):
    """Correlate against a 0/1 signal given only the indices of its ones.

    Lag slot ``k`` (lag ``k - d_max``) accumulates ``template[j - k]`` for every
    click index ``j`` with ``0 <= j - k < len(template)``.
    """
    n = template.shape[0]
    lags = 2 * d_max + 1
    out = np.zeros(lags, dtype=np.float64)
    for j in click_idx.tolist():
        k_lo = max(0, j - n + 1)
        k_hi = min(lags - 1, j)
        if k_lo > k_hi:
            continue
        # slot k takes template[j - k]; k ascending walks the template backwards
        m_hi = j - k_lo
        m_lo = j - k_hi
        out[k_lo:k_hi + 1] += template[m_lo:m_hi + 1][::-1]
    return out


def _sparse_correlation_loop(template, click_idx, d_max):
    n = template.shape[0]
    lags = 2 * d_max + 1
    out = np.zeros(lags, dtype=np.float64)
    for c in range(click_idx.shape[0]):
        j = click_idx[c]
        k_lo = max(0, j - n + 1)
        k_hi = min(lags - 1, j)
        for k in range(k_lo, k_hi + 1):
            out[k] += template[j - k]
    return out


if HAS_NUMBA:
    dead_time_numba = njit(cache=True, nogil=True)(_dead_time_loop)
    direct_correlation_numba = njit(cache=True, nogil=True)(_direct_correlation_loop)
    sparse_correlation_numba = njit(cache=True, nogil=True)(_sparse_correlation_loop)
else:  # pragma: no cover
    dead_time_numba = None
    direct_correlation_numba = None
    sparse_correlation_numba = None

USE_NUMBA = HAS_NUMBA and not _DISABLE

if USE_NUMBA:
    _dead_time = dead_time_numba
    _direct = direct_correlation_numba
    _sparse = sparse_correlation_numba
else:
    _dead_time = dead_time_numpy
    _direct = direct_correlation_numpy
    _sparse = sparse_correlation_numpy


def dead_time(clicks, dead_bins):
    return _dead_time(np.ascontiguousarray(clicks, dtype=np.bool_), int(dead_bins))


def direct_correlation(template, signal, d_max):
    return _direct(np.ascontiguousarray(template, dtype=np.float64),
                   np.ascontiguousarray(signal, dtype=np.float64), int(d_max))


def sparse_correlation(template, click_idx, d_max):
    return _sparse(np.ascontiguousarray(template, dtype=np.float64),
                   np.ascontiguousarray(click_idx, dtype=np.int64), int(d_max))


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decoysync import (ChannelConfig, ClickSequence, InvalidInput, apply_dead_time,
                       detection_count, key_rate_penalty, performance_score, qber_estimate)
from decoysync.analysis import PerformanceSeries, score_crossing


def test_all_true_scores_one():
    assert np.all(performance_score(np.ones(250, bool)) == 1.0)


def test_alternating_interior_is_half():
    x = np.arange(1000) % 2
    s = performance_score(x, 100)
    assert np.all(s[100:-100] == 0.5)


def test_clipped_windows_by_hand():
    np.testing.assert_allclose(performance_score([1, 1, 0, 1], 3), [1, 2 / 3, 2 / 3, 1 / 2])


def test_window_one_is_identity():
    x = [1, 0, 0, 1, 1]
    assert performance_score(x, 1).tolist() == [1.0, 0.0, 0.0, 1.0, 1.0]


def test_score_errors():
    with pytest.raises(InvalidInput):
        performance_score([])
    with pytest.raises(InvalidInput):
        performance_score([1, 0], 0)


def _brute_score(x, window):
    # explicit weights: odd -> box of `window`; even -> box of window+1 with half-weight ends
    n = len(x)
    h = window // 2
    out = []
    for i in range(n):
        num = den = 0.0
        for j in range(i - h, i + h + 1):
            if 0 <= j < n:
                w = 0.5 if (window % 2 == 0 and abs(j - i) == h) else 1.0
                num += w * x[j]
                den += w
        out.append(num / den)
    return out


@settings(max_examples=100, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=300), st.integers(1, 120))
def test_score_properties(x, window):
    s = performance_score(x, window)
    assert np.all((s >= 0) & (s <= 1))
    np.testing.assert_allclose(s, _brute_score([float(v) for v in x], window), atol=1e-12)
    np.testing.assert_allclose(performance_score(x[::-1], window)[::-1], s, atol=1e-12)


def test_performance_series_per_point():
    params = np.repeat([1.0, 2.0], 4)
    ps = PerformanceSeries.from_outcomes(params, [1, 1, 1, 1, 0, 0, 1, 0], window=3)
    v, rate, score = ps.per_point()
    assert v.tolist() == [1.0, 2.0]
    assert rate.tolist() == [1.0, 0.25]


def test_score_crossing():
    assert score_crossing([10, 20, 30, 40], [1.0, 0.8, 0.2, 0.0]) == pytest.approx(25.0)
    assert np.isnan(score_crossing([1, 2], [1.0, 0.9]))


def test_penalty_anchors():
    assert key_rate_penalty(0.01, 0.01, 25) == 0.0125
    assert key_rate_penalty(0.01, 0, 0) == 0.01
    assert key_rate_penalty(0, 0.7, 999) == 0


@settings(max_examples=100)
@given(p=st.floats(0, 0.5), q=st.floats(0, 1), d=st.integers(0, 100))
def test_penalty_linear(p, q, d):
    assert key_rate_penalty(2 * p, q, d) == pytest.approx(2 * key_rate_penalty(p, q, d), rel=1e-12, abs=1e-15)
    assert key_rate_penalty(p, q, 2 * d) - key_rate_penalty(p, q, d) == pytest.approx(p * q * d, rel=1e-9, abs=1e-15)


def test_penalty_rejects_bad_input():
    with pytest.raises(InvalidInput):
        key_rate_penalty(-0.1, 0, 0)
    with pytest.raises(InvalidInput):
        key_rate_penalty(0.1, 1.5, 0)


def test_qber_limits(base_table):
    assert qber_estimate(ChannelConfig(bcr=0), base_table) == 0
    assert qber_estimate(ChannelConfig(loss_db=400, bcr=1e3), base_table) == pytest.approx(0.5, abs=1e-9)


def test_qber_baseline(base_table):
    q = qber_estimate(ChannelConfig(loss_db=25, bcr=1e4), base_table)
    p_bg = 4e-6
    p_det = 0.7 * (1 - np.exp(-0.5 * 10 ** -2.5)) + 0.3 * (1 - np.exp(-0.25 * 10 ** -2.5))
    assert q == pytest.approx(0.5 * p_bg / (p_det + p_bg), rel=1e-9)
    assert q == pytest.approx(1.5e-3, abs=5e-5)


@settings(max_examples=100, deadline=None)
@given(loss=st.floats(0, 90), bcr=st.floats(0, 1e8))
def test_qber_bounds_and_monotone(loss, bcr):
    from decoysync import build_intensity_table
    table = build_intensity_table()
    q = qber_estimate(ChannelConfig(loss_db=loss, bcr=bcr), table)
    assert 0 <= q <= 0.5
    assert qber_estimate(ChannelConfig(loss_db=loss, bcr=bcr * 2 + 1), table) >= q
    assert qber_estimate(ChannelConfig(loss_db=loss + 1, bcr=bcr), table) >= q


def test_detection_count():
    c = ClickSequence(np.zeros(50, bool), 0, 0, 0)
    assert detection_count(c) == 0
    bits = np.random.default_rng(0).random(1000) < 0.2
    c = ClickSequence(bits, 0, 0, 0)
    assert detection_count(c) == bits.sum()
    assert detection_count(apply_dead_time(c, 3)) <= detection_count(c)

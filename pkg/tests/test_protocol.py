import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decoysync import (InvalidConfig, build_intensity_table, cross_correlate, generate_states,
                       make_template)
from decoysync.protocol import StateSequence


def test_base_table_entries(base_table):
    assert [(e.mu, e.prob, e.role) for e in base_table.entries] == [
        (0.5, 0.7, "signal"), (0.25, 0.3, "decoy")]


def test_bright_table_renormalises():
    t = build_intensity_table(0.5, 0.25, 0.7, 0.3, 50, 0.01)
    got = [(e.mu, e.prob, e.role) for e in t.entries]
    assert got[2] == (50, 0.01, "sync")
    assert got[0][1] == pytest.approx(0.695, abs=1e-15)
    assert got[1][1] == pytest.approx(0.295, abs=1e-15)
    assert abs(t.probs.sum() - 1) <= 1e-12


def test_zero_sync_probability_is_base_table(base_table):
    assert build_intensity_table(0.5, 0.25, 0.7, 0.3, 50, 0.0) == base_table


@pytest.mark.parametrize("kwargs", [
    dict(p_signal=0.8, p_decoy=0.3),
    dict(p_signal=0.7, p_decoy=0.3, mu_sync=50, p_sync=0.7),
    dict(p_signal=0.7, p_decoy=0.3, mu_sync=50, p_sync=-0.1),
    dict(mu_signal=-1.0),
])
def test_invalid_tables(kwargs):
    with pytest.raises(InvalidConfig):
        build_intensity_table(**kwargs)


def test_degenerate_categorical():
    t = build_intensity_table(0.5, 0.25, 1.0, 0.0)
    s = generate_states(t, 5, seed=1)
    assert s.intensities.tolist() == [0] * 5


def test_zero_length_rejected(base_table):
    with pytest.raises(InvalidConfig):
        generate_states(base_table, 0, seed=1)


def test_determinism(base_table):
    a = generate_states(base_table, 10_000, seed=99)
    b = generate_states(base_table, 10_000, seed=99)
    c = generate_states(base_table, 10_000, seed=100)
    assert np.array_equal(a.intensities, b.intensities)
    assert not np.array_equal(a.intensities, c.intensities)


def test_signal_count_binomial_bound(base_table):
    n = 10 ** 6
    bound = 3 * math.sqrt(n * 0.7 * 0.3)
    for seed in (0, 1, 2):
        s = generate_states(base_table, n, seed)
        assert abs(np.count_nonzero(s.intensities == 0) - 0.7 * n) <= bound


def test_empirical_frequencies_converge(bright_table):
    n = 10 ** 5
    probs = bright_table.probs
    tol = 4 * np.sqrt(probs * (1 - probs) / n)
    ok = 0
    for seed in range(100):
        s = generate_states(bright_table, n, seed)
        freq = np.bincount(s.intensities, minlength=3) / n
        ok += bool(np.all(np.abs(freq - probs) <= tol))
    assert ok >= 99


def _states(roles_idx, table):
    return StateSequence(np.asarray(roles_idx, dtype=np.uint8), table, 0)


def test_binary_template(base_table):
    t = make_template(_states([0, 1, 0], base_table), "binary", zero_mean=False)
    assert t.values.tolist() == [1.0, 0.0, 1.0]


def test_intensity_template_levels(base_table):
    s = generate_states(base_table, 1000, 3)
    t = make_template(s, "intensity", zero_mean=False)
    assert set(np.unique(t.values)) <= {0.5, 0.25}
    b = make_template(s, "binary", zero_mean=False)
    assert np.allclose(t.values, 0.25 + 0.25 * b.values)


def test_sync_bins(bright_table):
    s = generate_states(bright_table, 10_000, 5)
    sync = s.intensities == 2
    assert sync.any()
    assert np.all(make_template(s, "binary", zero_mean=False).values[sync] == 1.0)
    assert np.all(make_template(s, "intensity", zero_mean=False).values[sync] == 50.0)


def test_zero_mean(bright_table):
    s = generate_states(bright_table, 12_345, 8)
    for mode in ("binary", "intensity"):
        assert abs(make_template(s, mode, zero_mean=True).values.mean()) <= 1e-9


def test_unknown_mode(base_table):
    with pytest.raises(InvalidConfig):
        make_template(_states([0], base_table), "bogus")


@settings(max_examples=60, deadline=None)
@given(n=st.integers(8, 300), d_max=st.integers(1, 40), seed=st.integers(0, 2 ** 32))
def test_binary_and_intensity_pick_same_peak(n, d_max, seed):
    table = build_intensity_table(0.5, 0.25, 0.7, 0.3)
    s = generate_states(table, n, seed)
    clicks = np.random.default_rng(seed).random(n + 2 * d_max) < 0.3
    a = cross_correlate(make_template(s, "binary"), clicks)
    b = cross_correlate(make_template(s, "intensity"), clicks)
    assert np.allclose(b.values, 0.25 * a.values, atol=1e-9)
    # exact ties in the binary series may split either way under rounding
    assert a.peak_lag == b.peak_lag or np.isclose(a.values[b.peak_index], a.peak_value)

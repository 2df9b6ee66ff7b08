"""Transmitter side: intensity tables, random state sequences and templates."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig
from .rng import make_rng

SIGNAL = "signal"
DECOY = "decoy"
SYNC = "sync"

_PROB_TOL = 1e-12
_CHUNK = 1 << 22


@dataclass(frozen=True)
class IntensityEntry:
    mu: float
    prob: float
    role: str


@dataclass(frozen=True)
class IntensityTable:
    """Sendable coherent-pulse intensities and their send probabilities."""

    entries: tuple

    def __post_init__(self):
        roles = [e.role for e in self.entries]
        if roles.count(SIGNAL) != 1 or roles.count(DECOY) != 1 or roles.count(SYNC) > 1:
            raise InvalidConfig(f"table needs one signal, one decoy and at most one sync entry, got {roles}")
        for e in self.entries:
            if e.mu < 0:
                raise InvalidConfig(f"mean photon number must be >= 0, got {e.mu} for {e.role}")
            if not 0.0 <= e.prob <= 1.0:
                raise InvalidConfig(f"probability of {e.role} outside [0, 1]: {e.prob}")
        total = sum(e.prob for e in self.entries)
        if abs(total - 1.0) > _PROB_TOL:
            raise InvalidConfig(f"probabilities sum to {total!r}, expected 1")

    @property
    def mus(self):
        return np.array([e.mu for e in self.entries], dtype=np.float64)

    @property
    def probs(self):
        return np.array([e.prob for e in self.entries], dtype=np.float64)

    @property
    def roles(self):
        return tuple(e.role for e in self.entries)

    def index(self, role):
        return self.roles.index(role)

    @property
    def has_sync(self):
        return SYNC in self.roles


def build_intensity_table(mu_signal=0.5, mu_decoy=0.25, p_signal=0.7, p_decoy=0.3,
                          mu_sync=None, p_sync=None):
    """Build the signal/decoy table, optionally with a bright sync state.

    When a sync state is present, the signal and decoy send probabilities are
    each reduced by ``p_sync / 2`` so the table stays normalised. A sync state
    with ``p_sync == 0`` collapses to the plain two-entry table.

    Raises
    ------
    InvalidConfig
        If ``p_signal + p_decoy`` differs from 1 by more than 1e-12, or the
        sync probability would drive either base probability negative.
    """
    if abs(p_signal + p_decoy - 1.0) > _PROB_TOL:
        raise InvalidConfig(f"p_signal + p_decoy = {p_signal + p_decoy!r}, expected 1")
    if p_sync is None or p_sync == 0 or mu_sync is None:
        return IntensityTable((IntensityEntry(mu_signal, p_signal, SIGNAL),
                               IntensityEntry(mu_decoy, p_decoy, DECOY)))
    if not 0 < p_sync < min(2 * p_signal, 2 * p_decoy):
        raise InvalidConfig(
            f"sync probability {p_sync} must lie in (0, {min(2 * p_signal, 2 * p_decoy)}) "
            "so signal and decoy probabilities stay positive")
    half = p_sync / 2
    return IntensityTable((IntensityEntry(mu_signal, p_signal - half, SIGNAL),
                           IntensityEntry(mu_decoy, p_decoy - half, DECOY),
                           IntensityEntry(mu_sync, p_sync, SYNC)))


@dataclass(frozen=True, eq=False)
class StateSequence:
    """Alice's per-bin intensity choices, stored as indices into ``table``."""

    intensities: np.ndarray
    table: IntensityTable
    seed: int

    def __len__(self):
        return self.intensities.shape[0]

    @property
    def mu(self):
        """Mean photon number sent in each bin."""
        return self.table.mus[self.intensities]


def generate_states(table, n_alice, seed):
    """Draw ``n_alice`` i.i.d. categorical states from ``table``.

    Output depends only on ``(table, n_alice, seed)``.
    """
    n_alice = int(n_alice)
    if n_alice < 1:
        raise InvalidConfig(f"n_alice must be >= 1, got {n_alice}")
    cdf = np.cumsum(table.probs)
    cdf[-1] = np.inf
    rng = make_rng(seed)
    out = np.empty(n_alice, dtype=np.uint8)
    for start in range(0, n_alice, _CHUNK):
        stop = min(start + _CHUNK, n_alice)
        u = rng.random(stop - start)
        out[start:stop] = np.searchsorted(cdf, u, side="right")
    return StateSequence(out, table, int(seed))


@dataclass(frozen=True, eq=False)
class Template:
    values: np.ndarray
    zero_mean: bool
    mode: str

    def __len__(self):
        return self.values.shape[0]


def make_template(states, mode="binary", zero_mean=True):
    """Map a state sequence to the real-valued sequence Alice correlates with.

    ``binary`` maps signal and sync bins to 1 and decoy bins to 0.
    ``intensity`` maps each bin to its mean photon number, which lets bright
    sync pulses dominate the template. For a two-entry table the two modes
    differ by a positive affine map, so they select the same correlation peak.
    """
    if mode == "binary":
        lut = np.array([0.0 if r == DECOY else 1.0 for r in states.table.roles])
    elif mode == "intensity":
        lut = states.table.mus
    else:
        raise InvalidConfig(f"unknown template mode {mode!r}; expected 'binary' or 'intensity'")
    values = lut[states.intensities]
    if zero_mean:
        values = values - values.mean()
    return Template(values, bool(zero_mean), mode)

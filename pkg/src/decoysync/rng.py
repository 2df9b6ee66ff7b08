"""Seeded random streams.

Every random draw in the package goes through numpy's PCG64 bit generator,
keyed by a :class:`numpy.random.SeedSequence`. Substreams are derived by
hashing a parent seed together with integer keys (grid index, trial index,
stage), so the result of a trial never depends on which worker ran it or
in what order.
"""

import numpy as np

# Stage keys for the independent draws inside one trial.
STATES = 0
OFFSET = 1
CHANNEL = 2


def make_rng(seed):
    """Return a PCG64 generator for a 64-bit integer seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive_seed(seed, *keys):
    """Hash ``seed`` with integer ``keys`` into a new unsigned 64-bit seed."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])

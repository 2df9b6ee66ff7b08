"""Time the numba kernels against their pure-numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is called once
to trigger compilation before timing; results are checked for agreement.
The FFT correlator is included as the production reference point.
"""

import argparse
import timeit

import numpy as np

from decoysync import _kernels
from decoysync.sync import FFTCorrelator


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10 ** 6, help="template length")
    ap.add_argument("--d-max", type=int, default=200, help="offset window for the correlation kernels")
    ap.add_argument("--click-rate", type=float, default=1e-3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if not _kernels.HAS_NUMBA:
        print("numba is not installed; only the numpy timings are shown")
    gen = np.random.default_rng(0)
    n, d = args.n, args.d_max
    template = gen.standard_normal(n)
    bits = gen.random(n + 2 * d) < args.click_rate
    dense = bits.astype(np.float64)
    idx = np.flatnonzero(bits).astype(np.int64)
    busy = gen.random(n) < 0.2

    cases = {
        "dead_time(25)": (lambda f: f(busy, 25), "dead_time"),
        "direct_correlation": (lambda f: f(template, dense, d), "direct_correlation"),
        "sparse_correlation": (lambda f: f(template, idx, d), "sparse_correlation"),
    }
    print(f"n={n}  d_max={d}  clicks={idx.size}")
    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, (call, stem) in cases.items():
        np_fn = getattr(_kernels, f"{stem}_numpy")
        t_np = _best(lambda: call(np_fn), args.repeat)
        if _kernels.HAS_NUMBA:
            nb_fn = getattr(_kernels, f"{stem}_numba")
            ref, got = call(np_fn), call(nb_fn)
            assert np.allclose(ref, got, rtol=1e-9, atol=1e-9), name
            t_nb = _best(lambda: call(nb_fn), args.repeat)
            print(f"{name:<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<22}{t_np:>12.4f}{'-':>12}{'-':>10}")

    corr = FFTCorrelator(template, d)
    corr(bits)
    print(f"{'fft correlator':<22}{_best(lambda: corr(bits), args.repeat):>12.4f}  (nfft={corr.nfft})")


if __name__ == "__main__":
    main()

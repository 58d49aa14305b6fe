"""Time the compiled scan kernels against the NumPy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Both backends are checked
for agreement on every input before timing.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from pairscan import _pykernels as py

try:
    from pairscan import _ckernels as cy
except ImportError:
    cy = None


def _inputs(n: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    size = n
    lo = rng.integers(0, size, n)
    hi = lo + rng.integers(0, 300, n)
    pos = np.sort(rng.integers(0, size * 10, n))
    table = np.exp(-np.arange(400) / 60.0)
    t = np.sort(rng.uniform(0, n, n))
    vals = rng.standard_normal((n, 8))
    grid = np.arange(0.0, n, 1.0)
    return {
        "interval_accumulate": ((lo, hi, np.ones(n), size), {}),
        "profile_accumulate": ((pos, np.ones(n), table, -200, 0, 10, size), {}),
        "sliding_window_max": ((t, vals, grid, 200.0), {}),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    if cy is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':<22}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    for name, (args, kw) in _inputs(a.n, 1).items():
        fp = getattr(py, name)
        tp = min(timeit.repeat(lambda: fp(*args, **kw), number=1, repeat=a.repeat))
        if cy is None:
            print(f"{name:<22}{tp:>10.4f}{'-':>10}{'-':>9}")
            continue
        fc = getattr(cy, name)
        rp, rc = fp(*args, **kw), fc(*args, **kw)
        for u, v in zip(rp if isinstance(rp, tuple) else (rp,), rc if isinstance(rc, tuple) else (rc,)):
            np.testing.assert_allclose(u, v, rtol=1e-10, atol=1e-9)
        tc = min(timeit.repeat(lambda: fc(*args, **kw), number=1, repeat=a.repeat))
        print(f"{name:<22}{tp:>10.4f}{tc:>10.4f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()

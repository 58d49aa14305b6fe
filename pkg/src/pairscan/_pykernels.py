"""Pure-NumPy implementations of the hot scan kernels.

These mirror the compiled versions in ``_ckernels.pyx`` exactly and are used
whenever the extension is unavailable.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def interval_accumulate(lo, hi, weights, size):
    """Sum ``weights[j]`` over every index ``i`` with ``lo[j] <= i < hi[j]``.

    Intervals are clipped to ``[0, size)``; empty intervals contribute nothing.
    """
    lo = np.clip(np.asarray(lo, dtype=np.int64), 0, size)
    hi = np.clip(np.asarray(hi, dtype=np.int64), 0, size)
    w = np.asarray(weights, dtype=np.float64)
    keep = hi > lo
    diff = np.bincount(lo[keep], weights=w[keep], minlength=size + 1)
    diff -= np.bincount(hi[keep], weights=w[keep], minlength=size + 1)
    return np.cumsum(diff[:size])


def profile_accumulate(pos, weights, table, offset, start, step, size):
    """Add a tabulated profile for each event onto a regular grid.

    Grid point ``i`` sits at ``start + i*step``. Event ``j`` at integer position
    ``pos[j]`` adds ``weights[j] * table[d]`` where ``d = g - pos[j] - offset``
    whenever ``0 <= d < len(table)``.
    """
    pos = np.asarray(pos, dtype=np.int64)
    w = np.asarray(weights, dtype=np.float64)
    table = np.asarray(table, dtype=np.float64)
    out = np.zeros(size, dtype=np.float64)
    L = table.shape[0]
    if pos.size == 0 or L == 0 or size == 0:
        return out
    base = pos + offset - start
    # smallest grid index with d >= 0
    i0 = -((-base) // step)
    # one pass per grid point inside the profile support
    n_span = (L + step - 1) // step + 1
    for k in range(n_span):
        idx = i0 + k
        d = start + idx * step - pos - offset
        ok = (idx >= 0) & (idx < size) & (d >= 0) & (d < L)
        if not ok.any():
            continue
        np.add.at(out, idx[ok], w[ok] * table[d[ok]])
    return out


def sliding_window_max(t, vals, grid, delta):
    """Maximum over grid points ``g`` of sums of ``vals`` with ``g-delta <= t <= g``.

    Parameters
    ----------
    t : (n,) sorted event positions
    vals : (n, k) per-event values, one column per parameter setting
    grid : (m,) sorted evaluation points
    delta : window length

    Returns
    -------
    best : (k,) maximal window sum per column
    arg : (k,) index into ``grid`` of the first maximiser
    """
    t = np.asarray(t, dtype=np.float64)
    vals = np.asarray(vals, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    k = vals.shape[1]
    csum = np.vstack([np.zeros((1, k)), np.cumsum(vals, axis=0)])
    hi = np.searchsorted(t, grid, side="right")
    lo = np.searchsorted(t, grid - delta, side="left")
    best = np.full(k, -np.inf)
    arg = np.zeros(k, dtype=np.int64)
    chunk = max(1, 2_000_000 // max(k, 1))
    for c0 in range(0, grid.size, chunk):
        sl = slice(c0, c0 + chunk)
        z = csum[hi[sl]] - csum[lo[sl]]
        a = np.argmax(z, axis=0)
        v = z[a, np.arange(k)]
        better = v > best
        best[better] = v[better]
        arg[better] = a[better] + c0
    return best, arg

"""Pick the compiled scan kernels when available, else the NumPy fallback.

Set ``PAIRSCAN_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("PAIRSCAN_BACKEND", "").lower() == "python":
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        from . import _pykernels as _impl

BACKEND: str = _impl.BACKEND
interval_accumulate = _impl.interval_accumulate
profile_accumulate = _impl.profile_accumulate
sliding_window_max = _impl.sliding_window_max

__all__ = ["BACKEND", "interval_accumulate", "profile_accumulate", "sliding_window_max"]

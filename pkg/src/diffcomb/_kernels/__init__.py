"""Hot kernels with a compiled core and a pure-numpy fallback.

The backend is chosen once at import time.  Set DIFFCOMB_BACKEND to "pure"
or "compiled" to force one; "auto" (the default) prefers the compiled
extension and silently falls back to numpy when it is absent.

Both backends implement the same three entry points and agree to within
accumulation rounding (identically for integer-valued inputs):

  pair_sums(keys, weights, deltas)      -- autocorrelation pair sums
  expsum_int_batch(coords, weights, C)  -- exponential sums, exact phases
  expsum_float_batch(pos, weights, K)   -- exponential sums, float positions
"""

from __future__ import annotations

import os


def _load():
    choice = os.environ.get("DIFFCOMB_BACKEND", "auto")
    if choice not in ("auto", "pure", "compiled"):
        raise RuntimeError(f"DIFFCOMB_BACKEND must be auto, pure, or compiled, not {choice!r}")
    if choice in ("auto", "compiled"):
        try:
            from . import _ckern as mod

            return mod, "compiled"
        except ImportError:
            if choice == "compiled":
                raise
    from . import _ref as mod

    return mod, "pure"


_impl, _BACKEND = _load()

pair_sums = _impl.pair_sums
expsum_int_batch = _impl.expsum_int_batch
expsum_float_batch = _impl.expsum_float_batch


def backend_name() -> str:
    return _BACKEND

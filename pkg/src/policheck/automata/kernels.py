"""Kernel selection: numba-compiled by default, pure Python on request.

Set ``POLICHECK_NO_NUMBA=1`` (or any of ``true``/``yes``) to force the pure
path; it is also taken automatically when numba cannot be imported.  Both
paths produce identical arrays, so the flag is purely a speed/portability
knob.
"""

from __future__ import annotations

import os


def _numba_wanted() -> bool:
    flag = os.environ.get("POLICHECK_NO_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USING_NUMBA = _numba_wanted()

if USING_NUMBA:
    from ._kernels_numba import BUDGET_EXCEEDED, OK, determinize, product, reach
else:
    from ._kernels_py import BUDGET_EXCEEDED, OK, determinize, product, reach

__all__ = ["OK", "BUDGET_EXCEEDED", "USING_NUMBA", "determinize", "product", "reach"]

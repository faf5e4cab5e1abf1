"""Kernel backend selection.

The compiled extension (polarcover._speedups, built from Cython) and the
pure-Python module (polarcover._pykernels) expose the same names with the
same semantics; whichever imports first wins.  Set POLARCOVER_NO_SPEEDUPS=1
to force the Python backend, e.g. when comparing the two.
"""

from __future__ import annotations

import os

if os.environ.get("POLARCOVER_NO_SPEEDUPS"):
    from polarcover import _pykernels as _impl
    HAVE_SPEEDUPS = False
else:
    try:
        from polarcover import _speedups as _impl  # type: ignore[attr-defined]
        HAVE_SPEEDUPS = True
    except ImportError:
        from polarcover import _pykernels as _impl
        HAVE_SPEEDUPS = False

BACKEND = _impl.BACKEND

MODE_FREE = _impl.MODE_FREE
MODE_QUADRIC = _impl.MODE_QUADRIC
MODE_HERMITIAN = _impl.MODE_HERMITIAN
MODE_ALTERNATING = _impl.MODE_ALTERNATING

Scanner = _impl.Scanner
solve_cover = _impl.solve_cover

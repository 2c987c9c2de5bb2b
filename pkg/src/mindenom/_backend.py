"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
kernel is a drop-in replacement with identical semantics.  Set
MINDENOM_FORCE_PYTHON=1 to skip the extension (used by the parity tests
and benchmarks).
"""

import os

from mindenom import _pykernel

if os.environ.get("MINDENOM_FORCE_PYTHON"):
    kernel = _pykernel
else:
    try:
        from mindenom import _ckernel as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = _pykernel

BACKEND = kernel.backend_name()

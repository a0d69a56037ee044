"""Backend selection for the hot numeric kernels.

Set CRSPREDICT_BACKEND=numpy to force the pure-numpy fallback, or =numba to
require the compiled path (import error if numba is unavailable). Unset, the
compiled path is used when numba imports cleanly. ``benchmarks/bench_kernels.py``
times the two side by side.
"""

from __future__ import annotations

import os

_requested = os.environ.get("CRSPREDICT_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(f"CRSPREDICT_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    from . import numpy_backend as _impl

    BACKEND = "numpy"
elif _requested == "numba":
    from . import numba_backend as _impl  # type: ignore[no-redef]

    BACKEND = "numba"
else:
    try:
        from . import numba_backend as _impl  # type: ignore[no-redef]

        BACKEND = "numba"
    except ImportError:
        from . import numpy_backend as _impl  # type: ignore[no-redef]

        BACKEND = "numpy"

boost_split_scan = _impl.boost_split_scan
gini_split_scan = _impl.gini_split_scan
smo_pass = _impl.smo_pass


def backend_name() -> str:
    return BACKEND

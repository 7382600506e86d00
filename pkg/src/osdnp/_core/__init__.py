"""Kernel backend selection.

The compiled extension is used when importable; the numpy/scipy fallback
otherwise.  ``OSDNP_PURE_PYTHON=1`` forces the fallback regardless.
"""

import os

from . import pykernels

if os.environ.get("OSDNP_PURE_PYTHON") == "1":
    _impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"

INF = pykernels.INF
shortest_path_rows = _impl.shortest_path_rows
min_access = _impl.min_access
node_eval = _impl.node_eval


def backend() -> str:
    """Name of the active kernel backend: "cython" or "python"."""
    return BACKEND

"""Kernel backend selection.

The hot scalar kernels exist twice: a Cython extension
(``gasnet._kernels``) and a pure-Python twin (``gasnet._kernels_py``).
The compiled one is preferred when importable; set ``GASNET_PURE_PYTHON``
to any non-empty value to force the fallback.
"""

import os

if os.environ.get("GASNET_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels


def backend_name():
    return kernels.BACKEND

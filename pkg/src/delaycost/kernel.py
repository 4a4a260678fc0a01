"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting the environment
variable ``DELAYCOST_PURE=1`` forces the pure-Python implementation.
"""

import os

from . import _kernel_py

if os.environ.get("DELAYCOST_PURE", "") not in ("", "0"):
    _impl = _kernel_py
    BACKEND = "python"
else:
    try:
        from . import _kernel as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernel_py
        BACKEND = "python"

solve_parity = _impl.solve_parity
build_product = _impl.build_product

BACKENDS = {"python": _kernel_py}
if BACKEND == "compiled":
    BACKENDS["compiled"] = _impl
else:
    try:
        from . import _kernel as _compiled
        BACKENDS["compiled"] = _compiled
    except ImportError:
        pass

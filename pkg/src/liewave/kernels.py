"""Hot-loop kernels: compiled extension when built, pure Python otherwise.

Set ``LIEWAVE_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("LIEWAVE_PURE_PYTHON"):
    from ._kernels_py import integrate_blowup

    BACKEND = "python"
else:
    try:
        from ._kernels import integrate_blowup

        BACKEND = "compiled"
    except ImportError:
        from ._kernels_py import integrate_blowup

        BACKEND = "python"

__all__ = ["integrate_blowup", "BACKEND"]

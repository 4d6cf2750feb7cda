"""Select the compiled kernels when available, else the NumPy fallback.

Set ``ORTHOARM_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("ORTHOARM_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import count_iks_points, max_iks_joint_grid
else:
    try:
        from ._kernels import count_iks_points, max_iks_joint_grid

        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import count_iks_points, max_iks_joint_grid

__all__ = ["BACKEND", "count_iks_points", "max_iks_joint_grid"]

"""Select the compiled kernel when available, the NumPy fallback otherwise.

Set ``FRACDIL_FORCE_PURE=1`` to force the fallback (used by the benchmark and
by tests that exercise both paths).
"""

import os

if os.environ.get("FRACDIL_FORCE_PURE"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

COMPILED = kernels.COMPILED
bilinear_accumulate = kernels.bilinear_accumulate
spherical_symbol_values = kernels.spherical_symbol_values

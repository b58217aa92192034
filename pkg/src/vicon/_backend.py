"""Backend selection: compiled Cython kernels with a pure-NumPy fallback.

The compiled extension is preferred when importable.  Set
``VICON_BACKEND=numpy`` to force the fallback, or ``VICON_BACKEND=compiled``
to require the extension (raises if it is missing).
"""

import os

from . import _kernels_np

_requested = os.environ.get("VICON_BACKEND", "").strip().lower()

if _requested in ("numpy", "python"):
    backend = _kernels_np
elif _requested in ("", "auto", "compiled", "c"):
    try:
        from . import _kernels_c as backend  # type: ignore[no-redef]
    except ImportError:
        if _requested in ("compiled", "c"):
            raise ImportError(
                "VICON_BACKEND=compiled but the vicon._kernels_c extension "
                "is not built; reinstall with a C compiler available"
            )
        backend = _kernels_np
else:
    raise ValueError(f"unknown VICON_BACKEND value: {_requested!r}")

BACKEND_NAME = backend.NAME
posterior_pass = backend.posterior_pass
gradient_pass = backend.gradient_pass


def available_backends():
    """All importable backend modules, keyed by name (for benchmarks/tests)."""
    found = {_kernels_np.NAME: _kernels_np}
    try:
        from . import _kernels_c

        found[_kernels_c.NAME] = _kernels_c
    except ImportError:
        pass
    return found

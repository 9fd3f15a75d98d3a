"""Kernel backend selection.

The hot numeric loops live in two interchangeable implementations:
``_kernels.numba_impl`` (default when numba is importable) and
``_kernels.numpy_impl`` (pure numpy, always available). The environment
variable ``PARAFLOW_BACKEND`` picks one:

    auto   use numba when importable, else numpy (default)
    numba  require numba, fail loudly if it is missing
    numpy  force the pure-numpy fallback

Resolution happens once at import time; ``benchmarks/bench_kernels.py``
imports both implementations directly to compare them.
"""

from __future__ import annotations

import os

_ENV_VAR = "PARAFLOW_BACKEND"
_VALID = ("auto", "numba", "numpy")


def requested_backend() -> str:
    value = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if value not in _VALID:
        raise ValueError(
            f"{_ENV_VAR} must be one of {_VALID}, got {value!r}"
        )
    return value


def resolve_backend() -> str:
    """Return the backend name to use: 'numba' or 'numpy'."""
    value = requested_backend()
    if value == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if value == "numba":
            raise ImportError(
                f"{_ENV_VAR}=numba but numba is not importable"
            ) from None
        return "numpy"
    return "numba"

"""Kernel backend selection.

Two interchangeable implementations of the hot loops exist:

* ``numba``: @njit(parallel=True) kernels, the default when numba imports.
* ``numpy``: vectorized fallback, always available.

``SVF_BACKEND`` picks one explicitly (``auto`` | ``numba`` | ``numpy``);
``SVF_THREADS`` caps the numba thread count, clamped to what the runtime
actually offers. Both backends write each output pixel independently, so
results do not depend on the thread count.
"""

import os

from .errors import InvalidInputError

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only where numba is absent
    numba = None
    HAS_NUMBA = False

_VALID = ("auto", "numba", "numpy")
_threads_applied = False


def requested_backend() -> str:
    """Return the SVF_BACKEND setting after validation."""
    name = os.environ.get("SVF_BACKEND", "auto").strip().lower()
    if name not in _VALID:
        raise InvalidInputError(
            f"SVF_BACKEND must be one of {_VALID}, got {name!r}"
        )
    return name


def resolve_backend() -> str:
    """Map the request onto an available backend ('numba' or 'numpy')."""
    name = requested_backend()
    if name == "numba" and not HAS_NUMBA:
        raise InvalidInputError("SVF_BACKEND=numba but numba is not importable")
    if name == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    return name


def apply_thread_cap() -> int:
    """Apply SVF_THREADS to numba once per process; returns the thread count."""
    global _threads_applied
    if not HAS_NUMBA:
        return 1
    limit = numba.config.NUMBA_NUM_THREADS
    raw = os.environ.get("SVF_THREADS")
    if raw is None:
        return limit
    try:
        want = int(raw)
    except ValueError:
        raise InvalidInputError(f"SVF_THREADS must be an integer, got {raw!r}")
    # Out-of-range values clamp rather than fail: the variable is a cap, not
    # a hard requirement, and the kernels are thread-count invariant anyway.
    want = max(1, min(want, limit))
    if not _threads_applied or numba.get_num_threads() != want:
        numba.set_num_threads(want)
        _threads_applied = True
    return want

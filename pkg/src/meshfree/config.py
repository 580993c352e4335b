"""Backend selection and thread control.

Two environment variables steer execution:

``MESHFREE_NUMBA``
    ``1`` (default) compiles the hot kernels with numba, ``0`` forces the
    pure-numpy fallbacks.  Read once at import.

``MESHFREE_THREADS``
    Caps the number of threads used for batched weight computation.
    ``0`` or unset means "let the compiler decide".  Values above what
    the runtime supports are clamped rather than rejected so that
    portable configs do not crash on small machines.
"""

from __future__ import annotations

import os


def _env_flag(name: str, default: bool) -> bool:
    raw = os.environ.get(name)
    if raw is None:
        return default
    return raw.strip().lower() not in ("0", "false", "no", "off", "")


NUMBA_REQUESTED = _env_flag("MESHFREE_NUMBA", True)

if NUMBA_REQUESTED:
    try:
        import numba

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay importable
        numba = None
        HAS_NUMBA = False
else:
    numba = None
    HAS_NUMBA = False


def backend_name() -> str:
    """Active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if HAS_NUMBA else "numpy"


def max_threads() -> int:
    if HAS_NUMBA:
        return int(numba.config.NUMBA_NUM_THREADS)
    return 1


def requested_threads() -> int:
    """Thread cap from ``MESHFREE_THREADS``, already clamped; 0 means auto."""
    raw = os.environ.get("MESHFREE_THREADS", "0").strip()
    try:
        want = int(raw)
    except ValueError:
        want = 0
    if want < 0:
        want = 0
    return want


def set_threads(n: int | None = None) -> int:
    """Apply the thread cap to the numba runtime and return the count in use.

    ``n=None`` re-reads ``MESHFREE_THREADS``.  No-op on the numpy backend.
    """
    if n is None:
        n = requested_threads()
    if not HAS_NUMBA:
        return 1
    cap = max_threads()
    use = cap if n == 0 else min(n, cap)
    numba.set_num_threads(use)
    return use

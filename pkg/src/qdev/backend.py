"""Simulation kernel backend selection.

Two interchangeable kernel sets exist: numba JIT kernels (the default when
numba imports) and a pure-numpy fallback.  ``QDEV_BACKEND=numba|numpy``
forces one; ``QDEV_THREADS`` caps numba's worker count.  Results never
depend on the thread count — every replicate derives from its own counter
stream — and the two backends agree bit for bit on the uniform family and
to within 1 ulp per draw elsewhere (numpy's SIMD transcendentals round
differently from scalar libm).
"""

from __future__ import annotations

import os
from functools import lru_cache

from .errors import BackendError, ParameterError

BACKENDS = ("numba", "numpy")

_forced: str | None = None


@lru_cache(maxsize=1)
def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def set_backend(name: str | None) -> None:
    """Force a backend (tests/benchmarks); None restores env-based selection."""
    global _forced
    if name is not None and name not in BACKENDS:
        raise ParameterError(f"backend must be one of {BACKENDS}, got {name!r}")
    if name == "numba" and not numba_available():
        raise BackendError("numba backend requested but numba is not importable")
    _forced = name


def active_backend() -> str:
    if _forced is not None:
        return _forced
    env = os.environ.get("QDEV_BACKEND", "").strip().lower()
    if env:
        if env not in BACKENDS:
            raise ParameterError(f"QDEV_BACKEND must be one of {BACKENDS}, got {env!r}")
        if env == "numba" and not numba_available():
            raise BackendError("QDEV_BACKEND=numba but numba is not importable")
        return env
    return "numba" if numba_available() else "numpy"


def kernels():
    """Return the module providing ``quantile_replicates`` for the active backend."""
    if active_backend() == "numba":
        from . import _mc_numba as mod
    else:
        from . import _mc_numpy as mod
    return mod


def apply_thread_cap() -> int | None:
    """Apply QDEV_THREADS to numba (capped at the machine limit).

    No-op on the numpy backend.  Returns the effective thread count, or None
    when it does not apply.
    """
    if active_backend() != "numba":
        return None
    raw = os.environ.get("QDEV_THREADS", "").strip()
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    if not raw:
        numba.set_num_threads(limit)
        return limit
    try:
        requested = int(raw)
    except ValueError as exc:
        raise ParameterError(f"QDEV_THREADS must be an integer, got {raw!r}") from exc
    if requested < 1:
        raise ParameterError(f"QDEV_THREADS must be >= 1, got {requested}")
    effective = min(requested, limit)
    numba.set_num_threads(effective)
    return effective

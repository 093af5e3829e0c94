"""Kernel backend selection.

The hot loops (rotor stepping, checked stepping, random-walk baselines) exist
twice: a numba-JIT version and a pure-Python reference. The active backend is
chosen once at import from the ROTORLAB_BACKEND environment variable:

    ROTORLAB_BACKEND=numba    force numba (error if unavailable)
    ROTORLAB_BACKEND=python   force the pure-Python fallback
    unset / auto              numba when importable, else python

Tests and the benchmark switch at runtime via set_backend().
"""

from __future__ import annotations

import os

from . import _kernels_py

_BACKENDS = {"python": _kernels_py}
try:
    from . import _kernels_numba
    _BACKENDS["numba"] = _kernels_numba
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
    _kernels_numba = None

_requested = os.environ.get("ROTORLAB_BACKEND", "auto").strip().lower()
if _requested in ("", "auto"):
    _active = "numba" if "numba" in _BACKENDS else "python"
elif _requested in _BACKENDS:
    _active = _requested
else:
    raise ImportError(
        f"ROTORLAB_BACKEND={_requested!r} not available; "
        f"choose one of {sorted(_BACKENDS)} or 'auto'")


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def active_backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Switch kernels at runtime; returns the previous backend name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    prev = _active
    _active = name
    return prev


def kernels():
    """The module providing walk / walk_recorded / walk_checked / rw_* ."""
    return _BACKENDS[_active]

"""Engine backend selection.

The compiled engine is used when it imports; otherwise the pure-Python one.
``GMAB_BACKEND`` (``auto``, ``native`` or ``python``) overrides the default.
"""
from __future__ import annotations

import os
from typing import Optional

from ._pyengine import PythonEngine

try:
    from ._engine import NativeEngine, native_simulate, native_simulate_mean
except ImportError:  # extension not built
    NativeEngine = None
    native_simulate = None
    native_simulate_mean = None

NATIVE_AVAILABLE = NativeEngine is not None


def _default_backend() -> str:
    choice = os.environ.get("GMAB_BACKEND", "auto").strip().lower()
    if choice not in ("auto", "native", "python"):
        raise ImportError(f"GMAB_BACKEND must be auto, native or python, not {choice!r}")
    if choice == "native" and not NATIVE_AVAILABLE:
        raise ImportError("GMAB_BACKEND=native but the compiled extension is not built")
    if choice == "auto":
        return "native" if NATIVE_AVAILABLE else "python"
    return choice


DEFAULT_BACKEND = _default_backend()


def resolve_backend(backend: Optional[str] = None, memory: str = "tree") -> str:
    """Concrete backend name for a request (``None`` or ``auto`` picks the default)."""
    if backend is None or backend == "auto":
        # the naive memory exists only in Python
        return "python" if memory != "tree" else DEFAULT_BACKEND
    if backend == "native":
        if not NATIVE_AVAILABLE:
            raise RuntimeError("compiled engine not available")
        if memory != "tree":
            raise ValueError("the compiled engine only supports the tree memory")
        return backend
    if backend == "python":
        return backend
    raise ValueError(f"unknown backend {backend!r}")


def make_engine(problem, params, streams, backend: Optional[str] = None, memory: str = "tree", log: bool = False):
    name = resolve_backend(backend, memory)
    cls = NativeEngine if name == "native" else PythonEngine
    return cls(problem, params, streams, memory=memory, log=log)


__all__ = [
    "DEFAULT_BACKEND",
    "NATIVE_AVAILABLE",
    "NativeEngine",
    "PythonEngine",
    "make_engine",
    "native_simulate",
    "native_simulate_mean",
    "resolve_backend",
]

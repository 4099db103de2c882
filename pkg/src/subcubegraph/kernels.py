"""Kernel backend selection.

The compiled Cython module is used when importable; otherwise the pure-Python
fallback.  ``SUBCUBEGRAPH_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

python = _pykernels

compiled = None
if os.environ.get("SUBCUBEGRAPH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

active = compiled if compiled is not None else python
BACKEND = active.BACKEND


def get(backend: str | None = None):
    if backend is None:
        return active
    if backend == "python":
        return python
    if backend == "compiled":
        if compiled is None:
            raise RuntimeError("compiled kernels are not built (python setup.py build_ext --inplace)")
        return compiled
    raise ValueError(f"unknown backend {backend!r}")


def available() -> list[str]:
    return ["python"] + (["compiled"] if compiled is not None else [])

"""Kernel backend selection.

The compiled backend is used when its extension module importable;
otherwise the pure-Python fallback takes over.  EQRANK_BACKEND=python
or =cython overrides the choice (the latter fails loudly when the
extension is missing, which the test suite uses to compare backends).
"""

import os

from . import _pykernels

_requested = os.environ.get("EQRANK_BACKEND", "auto").strip().lower()

if _requested in ("", "auto"):
    try:
        from . import _ckernels as _backend
    except ImportError:
        _backend = _pykernels
elif _requested == "python":
    _backend = _pykernels
elif _requested == "cython":
    from . import _ckernels as _backend
else:
    raise ValueError(f"unknown EQRANK_BACKEND value: {_requested!r}")

BACKEND = _backend.NAME
pair_counts = _backend.pair_counts
label_step = _backend.label_step


def available_backends():
    """Names of the backends importable in this installation."""
    names = []
    try:
        from . import _ckernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


def get_backend(name):
    """Return the kernel module for an explicit backend name."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend: {name!r}")

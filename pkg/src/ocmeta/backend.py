"""Kernel backend selection.

The compiled extension (ocmeta._kernels) is preferred when importable; the
NumPy fallback (ocmeta._kernels_py) is bit-identical and always available.
Set OCMETA_BACKEND=c or OCMETA_BACKEND=py to force one side; `use()` switches
at runtime (the benchmark and the cross-backend tests rely on it).
"""

import os

from . import _kernels_py

try:
    from . import _kernels
except ImportError:  # pure install, no compiler at build time
    _kernels = None

_impl = None
_name = ""


def available():
    names = ["py"]
    if _kernels is not None:
        names.insert(0, "c")
    return names


def use(name):
    """Select the active backend: 'c', 'py', or 'auto'."""
    global _impl, _name
    if name == "auto":
        name = "c" if _kernels is not None else "py"
    if name == "c":
        if _kernels is None:
            raise RuntimeError("compiled kernels are not available in this install")
        _impl, _name = _kernels, "c"
    elif name == "py":
        _impl, _name = _kernels_py, "py"
    else:
        raise ValueError(f"unknown backend {name!r} (expected 'c', 'py' or 'auto')")


def active():
    return _name


def matmul(a, b, out):
    _impl.matmul(a, b, out)


def gaussian_fill(state, has_spare, spare, out):
    return _impl.gaussian_fill(state, has_spare, spare, out)


use(os.environ.get("OCMETA_BACKEND", "auto"))

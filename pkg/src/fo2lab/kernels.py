"""Backend selection for the refinement kernel.

The compiled extension is used when importable; ``FO2LAB_PURE=1`` forces the
numpy implementation.  Both produce identical labels.
"""

import os

from . import _refine_py

BACKEND = "python"
_impl = _refine_py

if os.environ.get("FO2LAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _refine_kernel as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _refine_py


def use_backend(name):
    """Switch backend at runtime ('cython' or 'python'); returns the previous one."""
    global _impl, BACKEND
    prev = BACKEND
    if name == "cython":
        from . import _refine_kernel

        _impl = _refine_kernel
    elif name == "python":
        _impl = _refine_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    return prev


def refine_round(colors, tuple_groups, group_ptr, members):
    return _impl.refine_round(colors, tuple_groups, group_ptr, members)


def relabel(codes):
    return _impl.relabel(codes)

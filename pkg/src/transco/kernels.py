"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting the environment
variable ``TRANSCO_PURE_PYTHON=1`` forces the pure-Python twin. ``BACKEND``
names the active choice.
"""

from __future__ import annotations

import os

from transco import _pykernels

if os.environ.get("TRANSCO_PURE_PYTHON", "") in ("", "0"):
    try:
        from transco import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"
else:
    _impl = _pykernels
    BACKEND = "python"

tridiag_eigh_batch = _impl.tridiag_eigh_batch
laguerre_kernel = _impl.laguerre_kernel
wigner_points = _impl.wigner_points


def backend_module(name: str):
    """Return the kernel module for ``"python"`` or ``"cython"`` (ImportError if unbuilt)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from transco import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")

"""Backend selection for the subset-table kernels.

The compiled extension is used when it imports; setting
``CANTORFILL_PURE_PYTHON=1`` forces the numpy/Python fallback.
"""

import importlib
import os

from . import _kernels_py

popcounts = _kernels_py.popcounts


def load_backend(name):
    if name == "python":
        return _kernels_py
    if name == "compiled":
        return importlib.import_module("cantorfill._kernels")
    raise ValueError(f"unknown backend {name!r}")


def _select():
    if os.environ.get("CANTORFILL_PURE_PYTHON"):
        return "python", _kernels_py
    try:
        return "compiled", load_backend("compiled")
    except ImportError:
        return "python", _kernels_py


BACKEND, _impl = _select()

subset_max_transform = _impl.subset_max_transform
min_at_popcount = _impl.min_at_popcount
first_filling_combination = _impl.first_filling_combination

"""Kernel backend selection.

The Monte Carlo hot loops exist twice: a compiled Cython extension
(``ofdm_im._kernels``) and a pure numpy fallback (``ofdm_im._kernels_py``)
with identical signatures.  Selection happens once at import time from the
``OFDM_IM_BACKEND`` environment variable:

* ``auto`` (default): compiled if importable, else python,
* ``python``: force the numpy fallback,
* ``compiled``: require the extension, raise if it is missing.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py

try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

_choice = os.environ.get("OFDM_IM_BACKEND", "auto").strip().lower()
if _choice == "python":
    _active: ModuleType = _kernels_py
    _active_name = "python"
elif _choice == "compiled":
    if _compiled is None:
        raise ImportError(
            "OFDM_IM_BACKEND=compiled but the ofdm_im._kernels extension "
            "is not built; reinstall the package with a C compiler or use "
            "OFDM_IM_BACKEND=python")
    _active = _compiled
    _active_name = "compiled"
elif _choice == "auto":
    _active = _compiled if _compiled is not None else _kernels_py
    _active_name = "compiled" if _compiled is not None else "python"
else:
    raise ValueError(
        f"OFDM_IM_BACKEND must be auto, python, or compiled, got {_choice!r}")


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return _active_name


def has_compiled() -> bool:
    """Whether the compiled extension is importable in this environment."""
    return _compiled is not None


def available_backends() -> tuple[str, ...]:
    return ("python", "compiled") if _compiled is not None else ("python",)


def get_kernels(name: str | None = None) -> ModuleType:
    """Kernel module by explicit name, or the active one when name is None."""
    if name is None:
        return _active
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ValueError("compiled kernel backend is not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


detect_confusion = _active.detect_confusion
segment_sum = _active.segment_sum
ici_accumulate = _active.ici_accumulate
em_pass = _active.em_pass

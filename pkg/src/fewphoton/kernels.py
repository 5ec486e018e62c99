"""Hot-loop kernels with import-time backend selection.

The compiled extension ``fewphoton._ckernels`` is preferred. Setting
``FEWPHOTON_PURE_PYTHON=1`` or failing to build the extension selects the
pure-Python implementations in ``fewphoton._pykernels``.
"""

import os

from . import _pykernels

if os.environ.get("FEWPHOTON_PURE_PYTHON", "") not in ("", "0"):
    _backend = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _backend  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _backend = _pykernels
        BACKEND = "python"

two_mode_amplitudes = _backend.two_mode_amplitudes
permanent = _backend.permanent

__all__ = ["BACKEND", "two_mode_amplitudes", "permanent"]

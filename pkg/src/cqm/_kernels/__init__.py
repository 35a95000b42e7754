"""Hot-kernel backend selection.

The compiled Cython module is preferred when present; a pure-numpy
fallback with identical semantics is used otherwise.  Set the
environment variable ``CQM_KERNEL_BACKEND`` to ``native`` or
``fallback`` before import to force a choice (``native`` raises if the
extension was not built).
"""

from __future__ import annotations

import os

_forced = os.environ.get("CQM_KERNEL_BACKEND", "").strip().lower()

if _forced == "fallback":
    from . import _fallback as _impl
elif _forced == "native":
    from . import _native as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _fallback as _impl

BACKEND: str = _impl.BACKEND
chirp_transform = _impl.chirp_transform
wigner_correlation = _impl.wigner_correlation
rk4_paths = _impl.rk4_paths

__all__ = ["BACKEND", "chirp_transform", "wigner_correlation", "rk4_paths"]

"""Backend selection for the disk-quadrature hot loop.

At import time the compiled Cython extension is preferred; the pure-NumPy
implementation is the fallback.  Setting the environment variable
``TELEFID_PURE_PYTHON=1`` forces the fallback (useful for the benchmark and
for debugging).  Both backends implement the same ``disk_log_nodes``
contract and agree to roughly machine precision; they are not guaranteed
to be bit-identical because libm call ordering differs.
"""

from __future__ import annotations

import os

from . import _diskkern_py

if os.environ.get("TELEFID_PURE_PYTHON"):
    _impl = _diskkern_py
    COMPILED = False
else:
    try:
        from . import _diskkern as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        _impl = _diskkern_py
        COMPILED = False

disk_log_nodes = _impl.disk_log_nodes


def backend_name() -> str:
    """'cython' when the compiled extension is active, else 'numpy'."""
    return "cython" if COMPILED else "numpy"


def get_backends():
    """All importable backends, for cross-checks and the benchmark."""
    backends = {"numpy": _diskkern_py}
    try:
        from . import _diskkern  # type: ignore[attr-defined]

        backends["cython"] = _diskkern
    except ImportError:
        pass
    return backends

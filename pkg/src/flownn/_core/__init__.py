"""Hot-kernel backend selection.

Two interchangeable implementations of the performance-critical inner loops
(the simulator tick engine and the recurrent inference scans) live here:

* ``_ckernels`` -- Cython extension, compiled at install time;
* ``pyref``     -- pure-Python mirror, written op-for-op against the Cython
  code so both produce bit-identical float64 results.

The compiled backend is preferred when importable. Set ``FLOWNN_PURE_PY=1``
to force the pure-Python reference (used by the benchmark and equivalence
tests).
"""

import os

if os.environ.get("FLOWNN_PURE_PY"):
    from flownn._core import pyref as kernels
    _BACKEND = "python"
else:
    try:
        from flownn._core import _ckernels as kernels  # type: ignore[attr-defined]
        _BACKEND = "cython"
    except ImportError:
        from flownn._core import pyref as kernels
        _BACKEND = "python"


def backend_name() -> str:
    """Name of the active kernel backend: 'cython' or 'python'."""
    return _BACKEND


def get_backend(name: str):
    """Return a specific backend module by name (for equivalence tests)."""
    if name == "python":
        from flownn._core import pyref

        return pyref
    if name == "cython":
        from flownn._core import _ckernels  # type: ignore[attr-defined]

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")

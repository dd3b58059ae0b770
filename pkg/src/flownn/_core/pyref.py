"""Pure-Python reference implementations of the hot kernels.

Every function here mirrors its Cython counterpart in `_ckernels.pyx`
statement by statement so that both backends produce bit-identical float64
results. Keep the two files in sync when changing either.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

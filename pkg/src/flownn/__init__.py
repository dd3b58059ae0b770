"""FlowNN: physics-biased prediction of per-millisecond network flow dynamics.

The package bundles a fluid flow simulator with CUBIC-style congestion
control (`flownn.netsim`), the canonical trace/dataset layer
(`flownn.trace`), a small reverse-mode autodiff core (`flownn.ndiff`),
the FlowNN model and reference baselines, and the self-supervised
training / evaluation harness (`flownn.training`).
"""

__version__ = "0.1.0"

from flownn._core import backend_name

__all__ = ["backend_name", "__version__"]

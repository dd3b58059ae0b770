"""Exception types shared across the package."""


class FlowNNError(Exception):
    """Base class for package errors."""


class ConfigError(FlowNNError):
    """Invalid scenario, dataset, or model configuration."""


class TraceFormatError(FlowNNError):
    """Malformed trace CSV row; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TraceValidationError(FlowNNError):
    """A trace violates a structural invariant (gaps, negative rates, ...)."""


class ConservationError(FlowNNError):
    """Cumulative rate imbalance between neighboring nodes above tolerance."""


class ShapeError(FlowNNError):
    """Tensor/parameter shape mismatch."""


class DivergenceError(FlowNNError):
    """Training produced a non-finite loss."""

"""Exception types shared across the package."""


class GraphFormatError(ValueError):
    """Raised when a graph or plan file cannot be parsed."""


class GenerationError(RuntimeError):
    """Raised when a randomized construction exhausts its restart budget."""


class NumericalError(RuntimeError):
    """Eigensolver failed to converge; carries the best estimate so far."""

    def __init__(self, message: str, estimate: float | None = None,
                 residual: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual


class TwinLayerError(RuntimeError):
    """Twin-layer growth ran out of frontier before reaching its stop size.

    Signals that the graph is not in the regime the growth procedure
    needs; carries how far the construction got.
    """

    def __init__(self, message: str, achieved_depth: int = 0,
                 sizes: tuple[int, ...] = ()):
        super().__init__(message)
        self.achieved_depth = achieved_depth
        self.sizes = sizes


class WitnessValidationError(RuntimeError):
    """A search engine produced an invalid path/cycle witness (internal bug)."""

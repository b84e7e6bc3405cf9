"""Exception hierarchy shared across the package."""


class CausalWhatifError(Exception):
    """Base class for all domain errors raised by this package."""


class IngestError(CausalWhatifError):
    """Raised when a CSV file cannot be turned into a usable dataset."""


class ConstantColumnError(CausalWhatifError):
    """A column has zero variance and cannot be standardized or modeled."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} is constant (zero variance)")


class GraphEditError(CausalWhatifError):
    """An edit's precondition does not hold (missing edge, wrong edge kind, ...)."""


class CycleError(CausalWhatifError):
    """An edit or graph would create a directed cycle.

    Carries the offending cycle as a node list (first node repeated at the end).
    """

    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__("directed cycle: " + " -> ".join(self.cycle))


class FinalizeError(CausalWhatifError):
    """A mixed graph cannot be finalized into a causal DAG."""


class SingularityError(CausalWhatifError):
    """A matrix that must be inverted is singular or numerically unusable."""


class FitError(CausalWhatifError):
    """Model parameterization failed (rank deficiency, bad inputs, ...)."""


class InterventionError(CausalWhatifError):
    """An intervention request violates the engine's rules."""


class RealismError(CausalWhatifError):
    """Gaussian-mixture fitting or scoring failed."""


class MapError(CausalWhatifError):
    """Neighbor-map construction failed (too few neighbors, unknown row, ...)."""


class ModelFileError(CausalWhatifError):
    """A model file is malformed, has the wrong version, or fails validation."""


class SessionError(CausalWhatifError):
    """A service session is missing or in a state that forbids the operation."""

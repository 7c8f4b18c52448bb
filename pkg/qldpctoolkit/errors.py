"""Exception types shared across the toolkit.

Decoder failure is reported through ``DecodeOutcome.status``; nothing here is
raised for an ordinary FAIL.
"""


class DimensionError(ValueError):
    """Shape or modulus mismatch between operands."""


class ChainComplexError(ValueError):
    """A boundary map violates a complex invariant (for example d1 @ d2 != 0)."""


class GraphConstructionError(ValueError):
    """A base graph or lift cannot be built with the requested parameters."""


class InnerCodeSearchError(RuntimeError):
    """No inner parity-check matrix was found within the search limits."""


class EnumerationBudgetError(RuntimeError):
    """A brute-force enumeration would exceed its configured budget."""


class BuildStageError(RuntimeError):
    """Wraps a failure while building a code bundle, naming the stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"build failed at stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause

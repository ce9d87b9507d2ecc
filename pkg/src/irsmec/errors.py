"""Exception types shared across the package."""


class IrsMecError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(IrsMecError):
    """Model data with inconsistent shapes. Names the offending block."""

    def __init__(self, block, expected, got):
        self.block = block
        self.expected = expected
        self.got = got
        super().__init__(f"{block}: expected shape {expected}, got {got}")


class ConfigError(IrsMecError):
    """Invalid scenario parameter."""


class SolverError(IrsMecError):
    """A conic backend stalled or returned garbage (distinct from infeasible)."""

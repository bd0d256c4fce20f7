"""Exception types shared across the solver."""


class BoxMismatchError(ValueError):
    """Two fields live on incompatible truncation boxes."""


class ModeOutsideBoxError(ValueError):
    """A requested mode lies outside the storage box."""

    def __init__(self, mode, cutoff):
        self.mode = mode
        self.cutoff = cutoff
        super().__init__(f"mode {mode} outside storage box (cutoff {cutoff})")


class SmallDivisorError(ArithmeticError):
    """A phase divisor |omega.k| fell below the configured floor."""

    def __init__(self, k, value, floor):
        self.k = tuple(k)
        self.value = float(value)
        self.floor = float(floor)
        super().__init__(
            f"small divisor |omega.k| = {value:.3e} below floor {floor:.3e} at k = {self.k}"
        )


class AliasingError(ValueError):
    """Synthesis grid too coarse for the stored modes."""


class GridOverflowError(OverflowError):
    """Exponent field exceeds the configured cap on the sampling grid."""


class SpatialMeanError(ValueError):
    """An operation requiring zero spatial mean received a field with one."""


class SymbolFloorError(ArithmeticError):
    """A diagonal symbol value fell below its guaranteed lower bound."""


class NonContractionError(RuntimeError):
    """A fixed-point or Neumann iteration failed to contract."""

    def __init__(self, message, factor=None):
        self.factor = factor
        super().__init__(message)


class DenseCapError(ValueError):
    """Dense oracle basis exceeds the configured memory cap."""


class ConfigError(ValueError):
    """A run configuration violates a named precondition."""

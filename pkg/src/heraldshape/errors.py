"""Exception types shared across the package."""


class HeraldShapeError(Exception):
    """Base class for all package errors."""


class GridError(HeraldShapeError, ValueError):
    """A grid cannot represent the requested fields or frequencies."""


class FieldError(HeraldShapeError, ValueError):
    """Invalid sampled field (non-finite samples, zero norm, wrong shape)."""


class ModulatorError(HeraldShapeError, ValueError):
    """Transmission function violates |A| <= 1 or is otherwise invalid."""


class ZeroHeraldError(HeraldShapeError):
    """The requested detection outcome has zero probability amplitude."""


class AcausalClickError(ZeroHeraldError):
    """A causal filter cannot produce a click before any transmitted light."""


class InvariantError(HeraldShapeError):
    """A density matrix or other output failed a numerical sanity check."""

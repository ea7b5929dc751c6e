"""Exception types shared across the package."""


class IpmcError(Exception):
    """Base class for every error raised by this package."""


class NegativeWeightError(IpmcError):
    """A probability weight is negative."""


class NotNormalizedError(IpmcError):
    """Probability weights do not sum to one within tolerance."""


class EpsOutOfRangeError(IpmcError):
    """Contamination level outside [0, 1]."""


class IncoherentCredalSetError(IpmcError):
    """Interval bounds admit no probability mass function."""


class StateSpaceTooLargeError(IpmcError):
    """Vertex enumeration requested on a space above the configured cap."""


class UnknownStateError(IpmcError):
    """A state identifier is not part of the model's state space."""


class UnknownAtomError(IpmcError):
    """A formula mentions an atomic proposition the model never declares."""


class MissingRewardsError(IpmcError):
    """A reward query was issued against a model without rewards."""


class ImpreciseModelError(IpmcError):
    """A precise-only operation was applied to a model with non-singleton rows."""


class PreciseQueryError(IpmcError):
    """A precise-kind threshold operator was checked against an imprecise model."""


class NegativeHorizonError(IpmcError):
    """Time horizons must be non-negative."""


class NegativeBudgetError(IpmcError):
    """Reward budgets must be non-negative."""


class HorizonExceededError(IpmcError):
    """A bounded-until step count exceeds the model's declared horizon."""


class ExplosionGuardError(IpmcError):
    """Brute-force enumeration would exceed the configured work limit."""


class SchemaError(IpmcError):
    """A model document violates the expected schema.

    ``field`` holds a dotted path locating the offending entry.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class FormulaSyntaxError(IpmcError):
    """Formula text could not be parsed.

    ``position`` is the character offset of the failure, ``expected`` a short
    description of what the parser was looking for.
    """

    def __init__(self, position, expected, found=None):
        self.position = position
        self.expected = expected
        self.found = found
        detail = f"expected {expected}" + (f", found {found!r}" if found else "")
        super().__init__(f"syntax error at position {position}: {detail}")

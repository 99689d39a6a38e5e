"""Exception types shared across the package."""


class BeamhopError(Exception):
    """Base class for all beamhop errors."""


class DimensionMismatch(BeamhopError):
    """Array shapes are inconsistent with the system dimensions."""


class NonFiniteInput(BeamhopError):
    """An input array contains NaN or infinity."""


class InvalidSize(BeamhopError):
    """A size argument is out of range (e.g. zero antennas)."""


class InvalidDimensions(BeamhopError):
    """Pattern dimensions do not admit the requested construction."""


class TooLarge(BeamhopError):
    """Enumeration would exceed the configured size bound."""


class Unrepairable(BeamhopError):
    """Coverage repair is impossible (slot capacity below beam count)."""


class NonPositiveLogArgument(BeamhopError):
    """The surrogate log argument is not positive.

    Signals an auxiliary/precoder mismatch far from the fixed point.
    """


class InfeasibleRateConstraints(BeamhopError):
    """Per-beam rate thresholds cannot be met at the current auxiliaries.

    Carries the best-effort point (the one maximizing the minimum
    threshold slack) in ``best_effort``.
    """

    def __init__(self, message, best_effort=None, min_slack=None):
        super().__init__(message)
        self.best_effort = best_effort
        self.min_slack = min_slack


class MaxIterationsExceeded(BeamhopError):
    """An iterative solver exhausted its budget without converging."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class NoCandidates(BeamhopError):
    """The random-search sweep was started with no candidate patterns."""


class SlotFactorizationError(BeamhopError):
    """One or more per-slot factorizations failed.

    ``slot_errors`` maps slot index to the underlying exception and
    ``partial`` holds the results of the slots that succeeded.
    """

    def __init__(self, slot_errors, partial):
        self.slot_errors = dict(slot_errors)
        self.partial = dict(partial)
        super().__init__(f"factorization failed for slots {sorted(self.slot_errors)}")


class SingularGramWarning(UserWarning):
    """The analog Gram matrix was rank deficient; a ridge term was added."""


class ConfigError(BeamhopError):
    """Base class for experiment-configuration errors."""


class ParseError(ConfigError):
    """The config file is not valid JSON."""


class ValidationError(ConfigError):
    """The config violates one or more invariants.

    ``violations`` lists every violated invariant, not just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))

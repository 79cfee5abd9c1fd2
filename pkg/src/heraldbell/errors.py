"""Exception types raised across the package."""


class DomainError(ValueError):
    """A numeric input lies outside its admissible range."""


class DegenerateInputError(ValueError):
    """Inputs are in range but make the requested quantity undefined."""


class UnsupportedStateError(ValueError):
    """The detection formulas are only derived for the singlet."""


class ValidityDomainError(DomainError):
    """A closed-form expression is evaluated outside its region of validity."""


class NoViolationError(ValueError):
    """S <= 2, so no finite number of events gives a k-sigma violation."""


class AllocationError(ValueError):
    """Events cannot be split equally (or as requested) across the four settings."""


class ScenarioError(ValueError):
    """A scenario document failed to parse or validate."""

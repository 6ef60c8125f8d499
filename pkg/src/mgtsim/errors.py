"""Exception hierarchy for the simulator and harness."""


class MgtsimError(Exception):
    """Base class for all package errors."""


# -- grid / field contract violations ---------------------------------------

class NonPositiveLength(MgtsimError):
    pass


class TooFewCells(MgtsimError):
    pass


class NonFiniteInput(MgtsimError):
    pass


class NonPositiveCoefficient(MgtsimError):
    pass


# -- model -------------------------------------------------------------------

class NegativeArgument(MgtsimError):
    pass


class NonFiniteState(MgtsimError):
    pass


class NonPositiveGamma(MgtsimError):
    pass


class GammaNotPositive(MgtsimError):
    pass


class InvalidSpec(MgtsimError):
    pass


# -- integrator --------------------------------------------------------------

class DegenerateRange(MgtsimError):
    pass


class NonFiniteResult(MgtsimError):
    pass


# -- constants chain ---------------------------------------------------------

class NotDissipationDominated(MgtsimError):
    pass


# -- diagnostics -------------------------------------------------------------

class MissingLedger(MgtsimError):
    pass


class PreconditionGammaRange(MgtsimError):
    pass


class InsufficientData(MgtsimError):
    pass


class NonPositiveSeries(MgtsimError):
    pass


class NonMonotoneMean(MgtsimError):
    pass


# -- oracle ------------------------------------------------------------------

class NonConstantGamma(MgtsimError):
    pass


# -- scenario parsing ---------------------------------------------------------

class ParseError(MgtsimError):
    """Malformed scenario text. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ValidationError(MgtsimError):
    """A well-formed scenario with an invalid or unknown field."""

    def __init__(self, field, reason):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason

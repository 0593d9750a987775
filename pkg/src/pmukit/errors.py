"""Exception hierarchy for pmukit.

Every error raised by the library derives from PmukitError so callers can
catch one type at the CLI boundary.
"""


class PmukitError(Exception):
    """Base class for all pmukit errors."""


class EmptySeries(PmukitError):
    pass


class InvalidSpec(PmukitError):
    pass


class OrderTooLarge(PmukitError):
    pass


class DegenerateSignal(PmukitError):
    pass


class WindowTooLarge(PmukitError):
    pass


class ConstantSeries(PmukitError):
    pass


class WrongKind(PmukitError):
    pass


class TooShort(PmukitError):
    pass


class TooFewSamples(PmukitError):
    pass


class NumericalFailure(PmukitError):
    pass


class AboveNyquist(PmukitError):
    pass


class DegenerateBaseline(PmukitError):
    pass


class InfeasiblePlacement(PmukitError):
    pass


class OutOfRange(PmukitError):
    pass


class ParseError(PmukitError):
    pass


class RaggedRow(ParseError):
    pass


class NonUniformTimestamps(ParseError):
    pass


class MixedRates(PmukitError):
    pass


class SchemaError(PmukitError):
    pass

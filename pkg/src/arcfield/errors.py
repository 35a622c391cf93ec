"""Exception types shared across the package."""


class ArcFieldError(Exception):
    """Base class for every error raised by this package."""


class ZeroUpToTruncationError(ArcFieldError):
    """An operation needed a leading term, but none is known below the truncation."""

    def __init__(self, trunc=None, message=None):
        self.trunc = trunc
        super().__init__(message or f"series is zero up to truncation {trunc}")


class IndistinguishableAtTruncation(ArcFieldError):
    """All known coefficients agree; the question is undecidable at this truncation."""


class RamificationOverflow(ArcFieldError):
    """An operation would require a ramification index above the configured cap."""


class NegativeBaseForEvenRoot(ArcFieldError):
    """Even-denominator rational power of a series that is negative near 0+."""


class IrrationalLeadingRoot(ArcFieldError):
    """Exact mode cannot represent the required root of a leading coefficient."""


class NonPositiveValuationSubstitution(ArcFieldError):
    """Substitution requires the inner series to vanish at 0+ (positive order)."""


class UnboundedExpansion(ArcFieldError):
    """The result is an infinite series and no target truncation was supplied."""


class TruncationExhausted(ArcFieldError):
    """Input coefficients are known to too low an order to decide the next step."""


class IrrationalBranch(ArcFieldError):
    """Exact mode found no rational root for a Newton polygon edge equation."""


class NotPositive(ArcFieldError):
    """A square root was requested of a series that is not positive near 0+."""


class NoRealBranch(ArcFieldError):
    """No real series branch solves the given equation."""


class UnsupportedShape(ArcFieldError):
    """The system is not univariate or triangular, so preimage solving declines."""


class ZeroArc(ArcFieldError):
    """The arc is identically zero and cannot be lifted through the blow-up."""


class GuardViolation(ArcFieldError):
    """A division or even-root guard failed during map evaluation."""


class DegenerateData(ArcFieldError):
    """A fit received no usable samples."""


class CounterexampleFound(ArcFieldError):
    """A transfer check found a witness violating the claimed property."""

    def __init__(self, kind, witness):
        self.kind = kind
        self.witness = witness
        super().__init__(f"{kind}: counterexample found")


class ConfigError(ArcFieldError):
    """Invalid run configuration."""


class ParseError(ArcFieldError):
    """Input text rejected, with a byte span into the offending input."""

    def __init__(self, start, end, expected, found, text=""):
        self.start = start
        self.end = end
        self.expected = expected
        self.found = found
        self.text = text
        super().__init__(f"at byte {start}..{end}: expected {expected}, found {found}")


class DuplicateExponent(ParseError):
    """The same exponent appeared twice in a series literal."""


class UnknownVariable(ParseError):
    """An identifier is not in the declared variable list."""


class NonRationalExponent(ParseError):
    """Exponents must be integers or parenthesized integer fractions."""

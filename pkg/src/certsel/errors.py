"""Exception hierarchy shared by every module."""


class CertselError(Exception):
    """Base class for all errors raised by certsel."""


class UnknownVertexError(CertselError, KeyError):
    """A query named a vertex id that is not part of the instance."""

    def __str__(self):
        return Exception.__str__(self)


class ValidationError(CertselError, ValueError):
    """An instance (or assignment) violates a structural invariant."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoProverError(CertselError, ValueError):
    """Some in-class datapoint has no adjacent certificate, so no prover exists."""


class UndefinedMetricError(CertselError, ZeroDivisionError):
    """A metric would divide by zero (precision of an isolated set, kappa, AFC...)."""


class InfeasibleError(CertselError):
    """No prover/verifier pair meets the requested constraints."""


class BudgetExceededError(CertselError):
    """Exhaustive enumeration was refused because the instance is above the budget."""


class ParseError(CertselError, ValueError):
    """Input text is not well-formed (bad JSON, bad rational, bad line)."""

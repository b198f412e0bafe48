"""Exceptions raised by tame_monodromy.

Violated preconditions raise :class:`RejectedInput` or one of its
subclasses. Theorem and admissibility violations are not exceptions: they
are returned as :class:`~tame_monodromy.utils.Finding` records.
"""

__all__ = [
    'TameMonodromyError',
    'RejectedInput',
    'ParseError',
    'NotCyclotomicError',
    'UncoveredSpectrumError',
    'OracleTooLargeError',
    'InadmissibleError',
]


class TameMonodromyError(Exception):
    """Base class for all errors raised by tame_monodromy."""


class RejectedInput(TameMonodromyError, ValueError):
    """An operation was called outside of its domain."""


class ParseError(RejectedInput):
    """Input data in JSON or file form is malformed."""


class NotCyclotomicError(RejectedInput):
    """A polynomial is not a product of cyclotomic polynomials.

    ``residual`` is what remains after dividing out every cyclotomic factor.
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class UncoveredSpectrumError(RejectedInput):
    """The candidate eigenvalues do not account for the whole space."""

    def __init__(self, msg, covered=None, dimension=None):
        super().__init__(msg)
        self.covered = covered
        self.dimension = dimension


class OracleTooLargeError(RejectedInput):
    """A brute-force computation would exceed the configured cap."""

    def __init__(self, msg, size=None, cap=None):
        super().__init__(msg)
        self.size = size
        self.cap = cap


class InadmissibleError(RejectedInput):
    """An AbelianType failed validation; ``findings`` holds the violations."""

    def __init__(self, msg, findings=()):
        super().__init__(msg)
        self.findings = list(findings)

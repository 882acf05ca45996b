"""Exception hierarchy shared across the package."""


class HdxError(Exception):
    """Base class for all package errors."""


class MalformedInputError(HdxError):
    """Input data violates a structural precondition (duplicate labels, bad JSON...)."""


class DomainError(HdxError):
    """Arguments are well-formed but outside an operation's domain."""


class UnsupportedError(HdxError):
    """Operation is undefined for this value (e.g. weights of a non-pure complex)."""


class ResourceCapError(HdxError):
    """A configured size cap would be exceeded."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoConeError(HdxError):
    """No cone function exists; carries the homological obstruction if known."""

    def __init__(self, message, degree=None, simplex=None):
        super().__init__(message)
        self.degree = degree
        self.simplex = simplex


class ClassViolationError(DomainError):
    """A geometric class precondition (transversal line, class inequality) failed."""

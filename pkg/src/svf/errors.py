"""Exception hierarchy for the svf package.

Every error raised by the library is a subclass of SvfError so callers can
catch one type at the boundary. The CLI maps subclasses to exit codes.
"""


class SvfError(Exception):
    """Base class for all svf errors."""


class InvalidInputError(SvfError):
    """Parameter or array outside the documented domain."""


class DegenerateWindowError(SvfError):
    """A window clipped to zero area, or its centre lies outside the plane."""


class DecodeError(SvfError):
    """Image bytes could not be decoded, or use an unsupported layout."""


class IntegrityError(SvfError):
    """A stored decomposition is inconsistent with its manifest."""

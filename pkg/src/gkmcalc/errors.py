"""Exception hierarchy shared by the library and the command line."""


class GkmError(Exception):
    """Base class for every error raised by gkmcalc."""


class ConfigurationError(GkmError, ValueError):
    """Unsupported root system, parabolic subset or preset."""


class UsageError(GkmError, ValueError):
    """An operation was called on inputs it is not defined for."""


class ResourceLimitError(GkmError):
    """A configured size cap would be exceeded."""


class VerificationError(GkmError):
    """An input failed a mathematical check (for example not a GKM class)."""


class InternalError(GkmError, RuntimeError):
    """A division that theory guarantees to be exact left a remainder."""


class NotDivisibleError(GkmError, ArithmeticError):
    """Raised by exact division; ``remainder`` is the nonzero witness."""

    def __init__(self, remainder, divisor=None):
        self.remainder = remainder
        self.divisor = divisor
        msg = f"not divisible: remainder {remainder}"
        if divisor is not None:
            msg += f" modulo {divisor}"
        super().__init__(msg)

"""Exception hierarchy shared by every ringconv module."""


class RingConvError(Exception):
    """Base class for all ringconv errors."""


class NotDivisible(RingConvError, ArithmeticError):
    """Exact division by a power of p was requested on a non-multiple."""


class NotAUnit(RingConvError, ArithmeticError):
    """Inverse requested for an element divisible by p."""


class Inconsistent(RingConvError, ValueError):
    """A linear system over F_p has no solution."""


class Unreachable(RingConvError, ValueError):
    """A state cannot be steered to zero with the available inputs."""


class TooLarge(RingConvError, ValueError):
    """An exhaustive enumeration would exceed its guard."""


class ConditionViolated(RingConvError, ValueError):
    """A first-order representation fails one of its structural conditions."""

    def __init__(self, condition, message=None):
        self.condition = condition
        super().__init__(message or f"condition violated: {condition}")


class HypothesisViolated(RingConvError, ValueError):
    """The window parameters do not satisfy the decoder's hypotheses."""

    def __init__(self, condition, message=None):
        self.condition = condition
        super().__init__(message or f"hypothesis violated: {condition}")


class DecodeFailure(RingConvError):
    """Decoding gave up; ``position`` is the first time index that failed."""

    def __init__(self, message="decoding failed", position=None):
        self.position = position
        super().__init__(message if position is None else f"{message} at t={position}")


class WindowRetry(DecodeFailure):
    """A window attempt was rejected; try again with attempt ``next_h``."""

    def __init__(self, next_h, reason=""):
        self.next_h = next_h
        self.reason = reason
        super().__init__(f"window attempt rejected ({reason}); retry with h={next_h}")


class WindowExhausted(DecodeFailure):
    """No attempt index is left for this window."""

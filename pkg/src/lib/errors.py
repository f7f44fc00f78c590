"""Exception hierarchy shared by every area of the simulator."""
from typing import Iterable, Optional


class NovaError(Exception):
    """Base class for all simulator errors."""


class DomainError(NovaError, ValueError):
    """A function was evaluated outside its mathematical domain."""


class InvalidArgumentError(NovaError, ValueError):
    """An operation received arguments that violate its preconditions."""


class TrainingDivergenceError(NovaError, RuntimeError):
    """MLP training produced a non-finite loss."""

    def __init__(self, message: str, seed: Optional[int] = None):
        super().__init__(message)
        self.seed = seed


class UnsupportedBreakpointCountError(InvalidArgumentError):
    """The breakpoint count cannot be scheduled onto the broadcast NoC."""


class ProtocolError(NovaError, RuntimeError):
    """The wave schedule and a lookup address disagree."""


class ConfigError(NovaError, ValueError):
    """A configuration file or object violates its invariants."""


class CapacityError(ConfigError):
    """A LUT bank is too small for the requested breakpoint count."""


class UnknownNameError(ConfigError, KeyError):
    """A profile, workload, function or approximator name does not resolve."""

    def __init__(self, kind: str, name: str, known: Iterable[str]):
        self.kind = kind
        self.name = name
        self.known = sorted(known)
        super().__init__(f"Unknown {kind} '{name}'. Known {kind}s: {', '.join(self.known)}")

    def __str__(self) -> str:
        # KeyError.__str__ would repr() the message
        return self.args[0]


class ClaimCheckError(NovaError, AssertionError):
    """A reproduced result disagrees with a claimed or oracle value."""

"""Exception and diagnostic types shared by all modules."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagnostic:
    """A single validation finding.

    ``code`` is a stable CamelCase identifier (``"AreaMismatch"``, ...),
    ``where`` locates the problem (breakpoint indices, node or edge ids).
    """

    code: str
    message: str
    where: tuple = field(default_factory=tuple)

    def __str__(self) -> str:
        loc = f" at {', '.join(map(str, self.where))}" if self.where else ""
        return f"{self.code}{loc}: {self.message}"


class UnlinkedError(Exception):
    """Base class for every error raised by the package."""


class OutOfRange(UnlinkedError, ValueError):
    pass


class DegenerateProfile(UnlinkedError, ValueError):
    pass


class ValidationFailed(UnlinkedError, ValueError):
    """Raised when an object fails validation; carries the diagnostics."""

    def __init__(self, diagnostics, what: str = "model"):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid {what}: {lines}")


class InvalidTree(ValidationFailed):
    def __init__(self, diagnostics):
        super().__init__(diagnostics, "plane tree")


class InvalidSurface(ValidationFailed):
    def __init__(self, diagnostics):
        super().__init__(diagnostics, "surface graph")


class TooLarge(UnlinkedError):
    pass


class InvalidPoint(UnlinkedError, ValueError):
    pass


class EmptyCore(UnlinkedError):
    pass


class UnknownCell(UnlinkedError, KeyError):
    pass


class OverlapError(UnlinkedError, ValueError):
    pass


class TrackingAmbiguous(UnlinkedError):
    def __init__(self, sigma: float, message: str = ""):
        self.sigma = sigma
        super().__init__(f"ambiguous branch continuation at sigma={sigma!r}" + (f": {message}" if message else ""))


class Collision(UnlinkedError):
    def __init__(self, sigma: float, message: str = ""):
        self.sigma = sigma
        super().__init__(f"branch collision at sigma={sigma!r}" + (f": {message}" if message else ""))


class NotInSpectrum(UnlinkedError, ValueError):
    pass


class InvalidOrbit(UnlinkedError, ValueError):
    pass


class HypothesisViolated(UnlinkedError, ValueError):
    def __init__(self, clause: str, message: str):
        self.clause = clause
        super().__init__(f"hypothesis {clause} violated: {message}")


class ConstructionFailed(UnlinkedError, ValueError):
    def __init__(self, constraint: str, message: str):
        self.constraint = constraint
        super().__init__(f"construction failed ({constraint}): {message}")


class NonMorseGrid(UnlinkedError):
    pass


class CoarseWarning(UserWarning):
    """Emitted when a sampling resolution is too coarse to trust."""


class MalformedInput(UnlinkedError, ValueError):
    """Input that cannot be parsed into a model document."""

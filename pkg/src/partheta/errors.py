"""Exception and warning types shared across the toolkit."""

from __future__ import annotations


class PartialThetaError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PartialThetaError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class TailNotConverged(PartialThetaError):
    """A series tail failed to drop below tolerance within the term budget."""


class DivergesAtZero(PartialThetaError):
    """phi_k with k < 0 non-integer has unbounded terms as q -> 0+."""


class NoConvergence(PartialThetaError):
    """An iterative solver exhausted its iteration budget."""


class NoSignChange(PartialThetaError):
    """A bracketing scan found no sign change where one was required."""


class CoalescenceSuspected(PartialThetaError):
    """Two zeros sit too close to separate at the working tolerance.

    Carries the location of the near-double point when known.
    """

    def __init__(self, message: str, q: float | None = None, x: float | None = None):
        super().__init__(message)
        self.q = q
        self.x = x


class StepCollapse(PartialThetaError):
    """Continuation step size shrank below 1e-12 without making progress."""


class LostTrack(PartialThetaError):
    """A tracked zero could not be re-acquired after a continuation step."""


class SingularJacobian(PartialThetaError):
    """The 2x2 Newton system for a double zero became numerically singular."""


class BoundaryTooClose(PartialThetaError):
    """A zero lies within the safety margin of a counting contour."""


class PhaseJump(PartialThetaError):
    """Phase tracking could not keep increments below pi/2 on a contour."""


class MultipleRootsFound(UserWarning):
    """More than one root was found where at most one was expected."""

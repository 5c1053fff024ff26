"""Exception types raised by the solvers and the scenario front end."""


class GasnetError(Exception):
    """Base class for all errors raised by this package."""


class NonPositivePressure(GasnetError):
    """The equation of state produced a pressure <= 0."""


class NonPositiveDensity(GasnetError):
    """A curve evaluation or state update drove the density to <= 0."""


class NonPositiveFlux(GasnetError):
    """A compressor power balance was evaluated at mass flux <= 0."""


class NotSubsonic(GasnetError):
    """A state required to lie in the subsonic region does not."""


class VacuumFormation(GasnetError):
    """The Riemann data admit no positive-density solution."""


class NoConvergence(GasnetError):
    """An iterative solve exhausted its budget above tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularEntropyMix(GasnetError):
    """The incoming mass flux sum in the entropy mix is numerically zero."""


class SingularJacobian(GasnetError):
    """The coupling Jacobian could not be factorized."""


class SubsonicViolation(GasnetError):
    """A solver produced a state outside the admissible subsonic sets."""


class EventStarvation(GasnetError):
    """The event loop found no future event on an unbounded horizon."""


class ScenarioParseError(GasnetError):
    """The scenario document is not well-formed."""


class ScenarioValidationError(GasnetError):
    """One or more scenario fields violate the schema invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))

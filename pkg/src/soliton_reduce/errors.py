"""Exception hierarchy for the soliton construction pipeline."""


class SolitonReduceError(Exception):
    """Base class for all library errors."""


class DomainError(SolitonReduceError):
    """A right-hand side or formula was evaluated outside its domain.

    The adaptive integrator treats these as step rejections: the step is
    shrunk until an event localizes the offending locus.
    """


class DegenerateConformalFactor(DomainError):
    """|phi| fell below the guard tolerance; 1/phi^2 has no significance."""


class DegenerateAnsatz(SolitonReduceError):
    """tau = 0 and alpha = 0: the reduction variable is constant."""


class DegenerateSamplePoint(SolitonReduceError):
    """A partial derivative or fitted denominator is numerically zero at the
    sample point; the admissibility test needs a different point."""


class SingularLocus(DomainError):
    """4*tau*xi + Lambda = 0: the second-order equation degenerates to an
    algebraic constraint and is not integrated across."""


class NullTranslationDirection(SolitonReduceError):
    """tau = 0 with Lambda = 0 (lightlike translation direction): the reduced
    system no longer determines phi''."""


class NonPositiveH(DomainError):
    """h = phi^2 must stay positive in the constrained first-order system."""


class RequiresNonzeroTau(SolitonReduceError):
    """The constrained first-order system contains lambda/(2*tau)."""


class InvalidGalleryParams(SolitonReduceError):
    """Closed-form gallery entry instantiated with incompatible parameters."""


class OutOfDomain(SolitonReduceError):
    """Profile queried outside its integrated / defined xi-range."""


class StepSizeUnderflow(SolitonReduceError):
    """The step size shrank below the resolvable scale without an event."""


class EventAtStart(SolitonReduceError):
    """An event condition already holds at the initial state."""


class SamplingExhausted(SolitonReduceError):
    """The sample box cannot supply enough points satisfying the exclusions."""


class StencilOutOfDomain(SolitonReduceError):
    """A finite-difference stencil point left the evaluable region."""


class ConfigInvalid(SolitonReduceError):
    """Problem configuration failed validation.

    Carries a list of per-field messages.
    """

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class ProfileMalformed(SolitonReduceError):
    """Profile file unreadable or inconsistent with the configuration."""

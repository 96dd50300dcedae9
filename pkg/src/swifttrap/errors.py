"""Exception types shared across the package."""


class InfeasibleProtocolError(ValueError):
    """A stiffness protocol violates the feasibility condition.

    The overdamped variance flow only moves toward the target while
    sign(D*gamma - s*kbar) matches sign(s_f - s_i) at interior nodes; a
    protocol breaking that makes the duration integral undefined or
    divergent.
    """

    def __init__(self, message, node=None, s=None):
        super().__init__(message)
        self.node = node
        self.s = s


class SingularManifoldError(ValueError):
    """Pointwise evaluation exactly on the manifold D*gamma = s*kbar."""


class ConvergenceError(RuntimeError):
    """Iterative solver failed to reach tolerance.

    Carries the iteration count and the trailing update-norm history so
    callers can report how the solve stalled.
    """

    def __init__(self, message, iterations=None, update_history=None):
        super().__init__(message)
        self.iterations = iterations
        self.update_history = list(update_history) if update_history is not None else []


class SingularityTrapError(ConvergenceError):
    """Damping underflowed while avoiding the singular manifold."""


class IntegrationError(RuntimeError):
    """Forward integration failed (variance collapse or blow-up).

    The time of failure is stored on the exception.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t

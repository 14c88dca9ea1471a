"""Exception types shared across the toolkit.

Numerical non-convergence is kept distinct from domain errors so the CLI
can map it to its own exit code.
"""


class NonConvergenceError(RuntimeError):
    """An adaptive quadrature or refinement loop exhausted its budget."""

    def __init__(self, message, last_estimate=None, last_change=None):
        super().__init__(message)
        self.last_estimate = last_estimate
        self.last_change = last_change


class KernelOverflowError(OverflowError):
    """The final exponential of a log-domain kernel value would overflow.

    Raised instead of silently returning ``inf``.
    """

"""Exception types distinguishing validation from numerical failures."""


class NumericalError(RuntimeError):
    """A computation failed numerically (non-convergence, singular system)."""

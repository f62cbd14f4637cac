"""Exception and warning types shared across the package."""


class LighthouseError(Exception):
    """Base class for all package errors."""


class ConfigError(LighthouseError, ValueError):
    pass


class PoleError(LighthouseError, ZeroDivisionError):
    """A transform was evaluated on (or numerically at) one of its poles."""


class BranchError(LighthouseError, ValueError):
    """A fractional power was requested on its branch cut."""


class DistributionalDerivative(LighthouseError, TypeError):
    """Derivative of the Heaviside nonlinearity requested numerically."""


class NumericalFailure(LighthouseError, RuntimeError):
    """Base class for solver failures (mapped to exit code 3 by the CLI)."""


class NoRoot(NumericalFailure):
    pass


class NoSolution(NumericalFailure):
    pass


class NotCritical(NumericalFailure):
    pass


class Infeasible(NumericalFailure):
    pass


class NonDiagonalisable(NumericalFailure):
    pass


class DegenerateCrossing(NumericalFailure):
    """Grazing firing event: the phase velocity at threshold vanishes."""


class DegenerateEdges(NumericalFailure):
    pass


class DelayBufferError(LighthouseError, ValueError):
    """Simulation horizon shorter than the delay warm-up."""


class TruncationWarning(UserWarning):
    """A truncated harmonic sum has a non-negligible tail."""

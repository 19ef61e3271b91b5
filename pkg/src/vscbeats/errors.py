"""Exception types shared across the package."""


class VscBeatsError(Exception):
    """Base class for all errors raised by vscbeats."""


class InvalidParameter(VscBeatsError):
    """A physical parameter is out of its valid range."""


class DecoupledSystem(VscBeatsError):
    """The collective coupling vanishes; the polariton transformation is undefined."""


class InvalidInitialConditions(VscBeatsError):
    """Initial displacements/velocities are inconsistent with the system size or constraints."""


class InvalidInput(VscBeatsError):
    """Series or grids passed to an operation do not match."""


class StepSizeTooLarge(VscBeatsError):
    """Integrator time step exceeds the stability/accuracy guard."""


class NumericalDivergence(VscBeatsError):
    """Integration produced non-finite state."""


class TooLargeForDense(VscBeatsError):
    """System size exceeds the dense-eigensolver guard."""


class InsufficientSpan(VscBeatsError):
    """Trajectory does not span enough beat periods (or contrast) to measure."""


class MissingMomenta(VscBeatsError):
    """Trajectory lacks the velocity/momentum series required by the observable."""


class InvalidIndex(VscBeatsError):
    """Requested molecule index is not stored in the trajectory."""


class ConfigError(VscBeatsError):
    """Run configuration file is malformed or violates an invariant."""


class EmptyExcitedSetWarning(UserWarning):
    """Partial activation rounded down to zero excited molecules."""

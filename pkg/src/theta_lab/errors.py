"""Exception hierarchy shared by every theta_lab module."""


class ThetaLabError(Exception):
    """Base class; the CLI maps any subclass to exit code 3."""


class ParseError(ThetaLabError, ValueError):
    pass


class SingularMatrix(ThetaLabError, ValueError):
    pass


class NonConvergent(ThetaLabError):
    """Direct summation requested outside its region of absolute convergence."""


class RadiusExceeded(ThetaLabError):
    """The tail bound cannot reach the tolerance within ``max_radius``."""


class PoleError(ThetaLabError):
    pass


class NearLatticeError(ThetaLabError):
    """E1 requested too close to (but not on) a lattice point."""


class ZeroPoint(ThetaLabError, ValueError):
    pass


class SingularEvaluation(ThetaLabError):
    """A constituent E1 factor lands on the lattice in strict mode."""


class StabilizerViolation(ThetaLabError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"cycle term {index} breaks the stabilizer condition")


class BadAuxiliary(ThetaLabError, ValueError):
    pass


class BadLevel(ThetaLabError, ValueError):
    pass


class PermutationFailure(ThetaLabError):
    pass


class DegenerateStratum(ThetaLabError):
    """Cusp limit of E1 is not Bernoulli on the v = 0 stratum."""

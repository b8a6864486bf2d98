"""Exception types shared across the package."""


class SteerSimError(Exception):
    """Base class for every error raised by steersim."""


# linear algebra
class NonFinite(SteerSimError, ValueError):
    pass


class SingularMatrix(SteerSimError, ArithmeticError):
    pass


class NoConvergence(SteerSimError, ArithmeticError):
    pass


class UnstableDrift(SteerSimError):
    """The drift matrix has an eigenvalue with non-negative real part.

    A Lyapunov solution for such a matrix is not a stationary covariance.
    """


# model
class MismatchedMechanicalFrequencies(SteerSimError, ValueError):
    pass


# steering
class UnphysicalCovariance(SteerSimError, ValueError):
    pass


class SingularBlock(SteerSimError, ArithmeticError):
    pass


class SteeringMismatch(SteerSimError, AssertionError):
    """The Schur-complement and determinant steering formulas disagree."""


class NonPositiveNoise(SteerSimError, ValueError):
    pass


# sweep / cli
class UnknownPreset(SteerSimError, KeyError):
    pass


class ConfigError(SteerSimError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ParseError(ConfigError):
    pass


class MissingKey(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass

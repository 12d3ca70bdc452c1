class ParameterError(ValueError):
    pass


class UnsupportedConfiguration(ParameterError):
    pass


class InfiniteLengthError(ParameterError):
    pass


class NoLossError(ParameterError):
    pass


class UndefinedReferenceState(ParameterError):
    pass


class UnknownPreset(KeyError):
    pass


class ConvergenceError(ArithmeticError):
    """Adaptive quadrature gave up before reaching the requested tolerance.

    The best estimate and its error bound are kept so callers can decide
    whether the partial answer is still usable.
    """

    def __init__(self, message: str, estimate: complex, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class NarrowbandWarning(Warning):
    pass

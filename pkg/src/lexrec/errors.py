"""Exception hierarchy shared by all modules."""


class LexrecError(Exception):
    pass


class InputError(LexrecError, ValueError):
    """Malformed or out-of-range input data (symbols, strings, files)."""


class ParameterError(LexrecError, ValueError):
    """A numeric parameter is outside its valid range."""


class TrainingError(LexrecError):
    """Reestimation cannot proceed, e.g. the model assigns zero probability."""


class NumericError(LexrecError, ArithmeticError):
    pass


class NoHypothesisError(LexrecError):
    """No finite-cost reading of the input exists."""


class CorruptionError(LexrecError):
    """A word link chain does not terminate at the root record."""


class EvaluationError(LexrecError):
    pass


class ClassificationError(LexrecError, ValueError):
    pass

"""Exception hierarchy. The CLI maps each family to its own exit code."""


class FkdetError(Exception):
    """Base class for every error raised by this package."""


class ParseError(FkdetError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
            if text is not None:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class DimensionError(ParseError):
    pass


class PreconditionError(FkdetError, ValueError):
    pass


class ParameterError(PreconditionError):
    pass


class TableError(PreconditionError):
    """A multiplication table that is not a group; ``triple`` names the witness."""

    def __init__(self, message, triple=None):
        self.triple = triple
        super().__init__(message if triple is None else f"{message}: {triple}")


class NumericError(FkdetError, ArithmeticError):
    pass


class NotPositiveDefiniteError(NumericError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message if index is None else f"{message} (step {index})")


class ConvergenceError(NumericError):
    def __init__(self, message, residuals=None):
        self.residuals = residuals
        super().__init__(message)


class ResourceError(FkdetError, MemoryError):
    def __init__(self, message, reached=None):
        self.reached = reached
        super().__init__(message if reached is None else f"{message} (reached {reached})")

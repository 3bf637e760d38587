"""Exception types shared across the package."""


class PoleError(ZeroDivisionError):
    """A rational function was evaluated where its denominator vanishes."""


class SingularOperator(ArithmeticError):
    """An operator over the rational-function field has zero determinant."""


class NonTerminating(RuntimeError):
    """A canonical-transformation series did not terminate within the bound."""


class PoleEncountered(RuntimeError):
    """A numeric trajectory ran into a pole of the vector field."""


class StepUnderflow(RuntimeError):
    """The integrator step is too small for the requested interval."""


class ParseError(ValueError):
    """Malformed coefficient expression or tensor file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)

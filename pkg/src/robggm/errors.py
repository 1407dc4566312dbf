"""Exception and warning classes used throughout robggm."""


class RobGGMError(Exception):
    """Base class for all errors raised by robggm."""


class InputError(RobGGMError, ValueError):
    """Invalid user input (bad shapes, malformed files, inconsistent labels)."""


class NumericalError(RobGGMError, ArithmeticError):
    """A computation could not be carried out to the required accuracy."""


# -- linear algebra ---------------------------------------------------------

class NotPositiveDefinite(NumericalError):
    pass


class NonPositiveDiagonal(NumericalError):
    pass


class NotSymmetric(InputError):
    pass


class DimensionMismatch(InputError):
    pass


# -- graphs -----------------------------------------------------------------

class NonBinaryEntry(InputError):
    pass


class LabelMismatch(InputError):
    pass


# -- estimation -------------------------------------------------------------

class DegenerateData(InputError):
    """Too few observations, non-finite entries or a singular sample covariance."""


class NoConvergence(NumericalError):
    pass


class NegativeDeviance(NumericalError):
    """The constrained fit has a smaller log-determinant than the unconstrained one."""


# -- asymptotic constants ---------------------------------------------------

class IntegrationFailure(NumericalError):
    pass


class BracketFailure(NumericalError):
    pass


class InvalidQuery(InputError):
    pass


# -- file ingestion ---------------------------------------------------------

class ParseError(InputError):
    """Malformed CSV input; ``row`` and ``column`` are 1-based file coordinates."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class RaggedRows(ParseError):
    pass


class NonNumericCell(ParseError):
    pass


class EmptyFile(ParseError):
    pass


# -- warnings ---------------------------------------------------------------

class ConvergenceWarning(RuntimeWarning):
    """An iterative solver stopped at its iteration limit."""


class ConflictingModeWarning(UserWarning):
    """Both the plug-in and the direct estimator were requested."""

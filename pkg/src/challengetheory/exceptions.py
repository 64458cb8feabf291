from typing import Optional


class ChallengeTheoryError(ValueError):
    """Base class for every error raised by challengetheory.

    Subclasses ValueError so callers written against plain ValueError keep working.
    The exit_code is what the command line front-end returns for this error.
    """
    exit_code: int = 3


class ParseError(ChallengeTheoryError):
    """Malformed input file content, reported with its location."""
    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None, row: Optional[int] = None):
        self.path = path
        self.row = row
        location = ""
        if path is not None:
            location += f"{path}"
        if row is not None:
            location += f" row {row}" if location else f"row {row}"
        super().__init__(f"{location}: {message}" if location else message)


class InvalidInputError(ChallengeTheoryError):
    """Input that parses but violates the model's preconditions."""
    exit_code = 3


class NumericalError(ChallengeTheoryError):
    """A computation that cannot produce a meaningful number."""
    exit_code = 4


# core
class MixedSignError(InvalidInputError):
    pass


class DominanceError(InvalidInputError):
    pass


class DegenerateTieError(InvalidInputError):
    pass


class DomainError(InvalidInputError):
    """Argument outside the mathematical domain of a transform."""


# io
class DuplicateIdError(InvalidInputError):
    pass


class UnknownProblemIdError(InvalidInputError):
    pass


class UnknownAttributeError(InvalidInputError):
    pass


class DuplicateCellError(InvalidInputError):
    pass


# fit / crossval / analysis
class EmptyProblemError(InvalidInputError):
    pass


class EmptyDomainError(InvalidInputError):
    pass


class TooFewProblemsError(InvalidInputError):
    pass


class TooFewRespondentsError(InvalidInputError):
    pass


class InsufficientDataError(InvalidInputError):
    pass


class MismatchedPairError(InvalidInputError):
    pass


class DegenerateGroupError(InvalidInputError):
    pass


# numerical
class NonPositiveWeightGapError(NumericalError):
    pass


class ZeroVarianceError(NumericalError):
    pass


class DegenerateObjectiveError(NumericalError):
    pass

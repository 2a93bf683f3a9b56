"""Exception hierarchy shared by every module."""


class TSystemsError(Exception):
    """Base class for all library errors."""


class GroupSpecError(TSystemsError, ValueError):
    """A group spec string could not be parsed or names an unsupported group."""


class NotAGroupError(TSystemsError, ValueError):
    """A multiplication table failed the group-axiom audit."""


class BudgetExceeded(TSystemsError):
    """A computation would exceed its configured resource cap."""


class RankMismatch(TSystemsError, ValueError):
    pass


class NotSimpleError(TSystemsError, ValueError):
    pass


class Unreachable(TSystemsError):
    """The target vector lies outside the generated diagonal subgroup."""

    def __init__(self, message: str, subgroup_size: int):
        super().__init__(message)
        self.subgroup_size = subgroup_size


class NoGeneratingPair(TSystemsError):
    pass


class NoSpreadWitness(TSystemsError):
    pass


class MatrixExhausted(TSystemsError):
    """The greedy/backtracking matrix construction ran out of candidates."""


class VerificationFailed(TSystemsError):
    pass


class InternalInconsistency(TSystemsError, AssertionError):
    """Two routes that must agree by theory disagreed: a library bug."""

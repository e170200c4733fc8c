"""Exception types shared across the package.

Everything raised on purpose derives from TermRankError so callers can
catch one base class at API boundaries (CLI, HTTP) and map it to an
exit code or status code.
"""


class TermRankError(Exception):
    """Base class for all errors raised by this package."""


# --- corpus ---------------------------------------------------------------

class InvalidDocument(TermRankError):
    """Input document is empty or contains no extractable text."""


class NotEnoughStatements(TermRankError):
    """Segmentation produced fewer statements than the operation needs."""


# --- pairing / sampling ---------------------------------------------------

class CoverageInfeasible(TermRankError):
    """Requested pair budget cannot cover every statement at least once.

    Carries the minimum feasible count so callers can report it.
    """

    def __init__(self, requested: int, minimum: int):
        self.requested = requested
        self.minimum = minimum
        super().__init__(
            f"cannot cover all statements with {requested} pairs; "
            f"minimum feasible is {minimum}"
        )


class InvalidChoice(TermRankError):
    """A vote names a statement that is not part of the presented pair."""


class IncompleteComparison(TermRankError):
    """A pair has fewer recorded votes than the protocol requires."""


# --- btrank ---------------------------------------------------------------

class EmptyInput(TermRankError):
    """An operation that needs at least one element received none."""


class NoData(TermRankError):
    """No comparison outcomes available to fit or rank."""


class UnknownStatement(TermRankError):
    """A referenced statement id does not exist in the fitted model."""


class InsufficientData(TermRankError):
    """Too few observations for the requested statistic."""


# --- textstats / classifier ----------------------------------------------

class InvalidInput(TermRankError):
    """Malformed argument value (wrong shape, empty text, bad range)."""


class InvalidLabels(TermRankError):
    """Label vector is not binary or does not match the data length."""


class InvalidThreshold(TermRankError):
    """Importance threshold outside the accepted range."""


class DegenerateTrainingSet(TermRankError):
    """Training data contains fewer than two classes."""


# --- service ---------------------------------------------------------------

class InsufficientWorkers(TermRankError):
    """Simulation asked to run with fewer workers than the protocol needs."""


class NoTaskAvailable(TermRankError):
    """No open task is assignable to this worker right now."""


class UnknownWorker(TermRankError):
    """Worker id was never registered."""


class UnknownPolicy(TermRankError):
    """Policy id was never ingested."""


class StaleAssignment(TermRankError):
    """Vote submitted against an assignment that has expired or was reassigned."""


class ConflictingResubmission(TermRankError):
    """Same assignment submitted twice with a different choice."""

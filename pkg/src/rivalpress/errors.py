"""Exception types shared across the package.

Every raisable failure mode has its own class so callers (and the CLI exit
code mapping) can dispatch on type rather than message text.
"""


class RivalPressError(Exception):
    """Base class for all package errors."""


# --- competition protocol ---------------------------------------------------

class CompetitionError(RivalPressError):
    pass


class DuplicateLifter(CompetitionError):
    pass


class MissingOpener(CompetitionError):
    pass


class RosterTooSmall(CompetitionError):
    pass


class MissingDeclaration(CompetitionError):
    pass


class DecreaseNotAllowed(CompetitionError):
    pass


class RepeatAfterSuccessNotAllowed(CompetitionError):
    pass


class OutOfTurn(CompetitionError):
    pass


class AlreadyRecorded(CompetitionError):
    pass


class IncompleteRound(CompetitionError):
    pass


class InvalidDecisionPoint(CompetitionError):
    pass


class EmptyInput(RivalPressError):
    pass


# --- behavior model / policy ------------------------------------------------

class ContextViolation(RivalPressError):
    pass


class BoundaryTie(RivalPressError):
    """Evaluation weight coincides with a rival boundary; perturb by kappa."""


class NonpositiveWeight(RivalPressError):
    pass


class EmptyGrid(RivalPressError):
    pass


# --- econometrics -------------------------------------------------------------

class EstimationError(RivalPressError):
    pass


class RankDeficient(EstimationError):
    pass


class SingularNormalEquations(EstimationError):
    pass


class TooFewClusters(EstimationError):
    pass


class UnderIdentified(EstimationError):
    pass


class TooFewRows(EstimationError):
    pass


class FeatureLeakage(EstimationError):
    pass


class DegenerateReplicate(EstimationError):
    pass


class SchemaMismatch(EstimationError):
    pass


class WeakInstrumentWarning(UserWarning):
    """First-stage F below 10; reported, not fatal."""


# --- ingestion / simulation ---------------------------------------------------

class MissingHeader(RivalPressError):
    pass


class UnsortedHistory(RivalPressError):
    pass


class InformationLeakage(RivalPressError):
    """A pressure component fell outside the declaring lifter's information set."""


class ConfigInvalid(RivalPressError):
    pass

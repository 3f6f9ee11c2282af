"""Custom exceptions for fairpool."""


class FairpoolError(Exception):
    """Base exception for fairpool-related errors."""


# History model


class HistoryError(FairpoolError, ValueError):
    """Exception raised for malformed histories or invalid history operations."""


class EmptyHistoryError(HistoryError):
    """Exception raised when a history contains no shares."""


class NonMonotoneTimeError(HistoryError):
    """Exception raised when share times tie or decrease."""


class OpenTrailingRoundError(HistoryError):
    """Exception raised when the last share of a history is not a full solution."""


class InvalidRewardError(HistoryError):
    """Exception raised when block reward or fee violate 0 <= f <= B."""


class DuplicateShareError(HistoryError):
    """Exception raised when two shares carry the same identifier."""


class UnknownShareError(HistoryError, KeyError):
    """Exception raised when a share does not belong to the history."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown share"


class RoundOutOfRangeError(HistoryError, IndexError):
    """Exception raised for a round index outside 1..number of rounds."""


class OrderViolatedError(HistoryError):
    """Exception raised when a time-shift leaves the open neighbour interval."""


# Reward sharing schemes


class SchemeError(FairpoolError, ValueError):
    """Base exception for scheme parameter and evaluation errors."""


class RoundTooLongError(SchemeError):
    """Exception raised when a round is longer than the epsilon table supports."""


class InvalidEpsilonError(SchemeError):
    """Exception raised for epsilon tables violating the family constraints."""


class InvalidDeltaError(SchemeError):
    """Exception raised when the k-pseudo proportional delta is outside [0, R]."""


class InvalidRatioError(SchemeError):
    """Exception raised when a geometric ratio is not greater than one."""


class UnknownSchemeIdError(SchemeError):
    """Exception raised for an independence scheme id outside 1..6."""


class InvalidParamsError(SchemeError):
    """Exception raised for scheme parameters outside their admissible range."""


class SchemeSpecError(SchemeError):
    """Exception raised for scheme specification strings that do not parse."""


# Axiom checking


class CheckError(FairpoolError):
    """Base exception for axiom checker errors."""


class CounterexampleReplayError(CheckError):
    """Exception raised when a counterexample fails to re-verify."""


# Harness


class HarnessError(FairpoolError):
    """Base exception for table reproduction and fixture errors."""


class MismatchedCellError(HarnessError):
    """Exception raised when a reproduced table differs from the expected grid."""


class FixtureMismatchError(HarnessError):
    """Exception raised when a worked example does not reproduce."""


# Configuration and interchange


class ConfigError(FairpoolError):
    """Exception raised when the configuration file cannot be used."""


class UsageError(FairpoolError):
    """Exception raised for command lines that do not parse."""


class CodecError(FairpoolError, ValueError):
    """Exception raised for malformed JSON documents or rational strings."""

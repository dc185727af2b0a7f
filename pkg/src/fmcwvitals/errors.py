"""Exception hierarchy.

Everything raised on bad data derives from ``FMCWError`` so the CLI can map
it to a data-error exit code in one place.
"""


class FMCWError(Exception):
    pass


class InvalidProfile(FMCWError, ValueError):
    pass


class AliasedMotion(FMCWError, ValueError):
    pass


class EmptyTrace(FMCWError, ValueError):
    pass


class OutOfRange(FMCWError, ValueError):
    pass


class Unreachable(FMCWError, ValueError):
    pass


class TooFewChirps(FMCWError, ValueError):
    pass


class ZeroMagnitude(FMCWError, ValueError):
    pass


class BandInvalid(FMCWError, ValueError):
    pass


class NoPeak(FMCWError, ValueError):
    pass


class TraceTooShort(FMCWError, ValueError):
    pass


class LengthMismatch(FMCWError, ValueError):
    pass


class RecordingFormatError(FMCWError):
    pass


class BadMagic(RecordingFormatError):
    pass


class VersionUnsupported(RecordingFormatError):
    pass


class TruncatedPayload(RecordingFormatError):
    pass


class ScenarioError(FMCWError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(ScenarioError):
    pass


class UnknownKey(ScenarioError):
    pass


class UnitViolation(ScenarioError):
    pass

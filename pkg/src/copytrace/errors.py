"""Exception hierarchy shared across the pipeline."""


class CopytraceError(Exception):
    """Base class for all errors raised by this package."""


# --- object store ---

class NotAGitRepository(CopytraceError):
    pass


class UnsupportedPackVersion(CopytraceError):
    pass


class CorruptIndex(CopytraceError):
    pass


class ObjectNotFound(CopytraceError):
    pass


class CorruptObject(CopytraceError):
    pass


class DeltaBaseMissing(CopytraceError):
    pass


class DeltaDepthExceeded(CopytraceError):
    pass


class MalformedCommitHeader(CopytraceError):
    pass


class CorruptTree(CopytraceError):
    pass


# --- extraction ---

class CycleDetected(CopytraceError):
    pass


class UnmappedRepository(CopytraceError):
    pass


# --- deforking ---

class UnknownRepository(CopytraceError):
    pass


# --- timeline ---

class ShardIOFailure(CopytraceError):
    pass


class SpillSpaceExhausted(CopytraceError):
    pass


class UnsortedInput(CopytraceError):
    pass


# --- metrics ---

class WindowExceedsCorpusSpan(CopytraceError):
    pass


# --- statistics ---

class Singular(CopytraceError):
    pass


class Separation(CopytraceError):
    """Raised when a fit hits the iteration cap with runaway coefficients.

    Carries the partial result (converged=False) as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ClassMissing(CopytraceError):
    pass


class DegenerateInput(CopytraceError):
    pass


# --- synthesis / orchestration ---

class ScriptInvalid(CopytraceError):
    pass


class DirNotEmpty(CopytraceError):
    pass


class MissingStageOutput(CopytraceError):
    pass


class ConfigError(CopytraceError):
    pass

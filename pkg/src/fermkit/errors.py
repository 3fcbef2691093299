"""Exception hierarchy shared by all fermkit modules."""


class FermkitError(Exception):
    """Base class for every error raised by fermkit."""


class InvalidArgument(FermkitError, ValueError):
    pass


class ShapeError(InvalidArgument):
    pass


class UnsupportedFormat(FermkitError, ValueError):
    pass


class WriteError(FermkitError, OSError):
    pass


class ConvergenceError(FermkitError, ArithmeticError):
    pass


class EmptySelection(FermkitError, ValueError):
    """Feature selection kept no columns."""


class NoFaceFound(FermkitError, ValueError):
    pass


class EmptyCorpus(FermkitError, ValueError):
    pass


class PairingError(FermkitError, ValueError):
    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = list(missing)


class ConfigError(FermkitError, ValueError):
    pass


class PipelineError(FermkitError):
    """Wraps a failure inside one pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause

class TorusFoldError(Exception):
    """
    Base of every domain error.
    exit_code plays the role an HTTP status code plays in a web handler:
    the CLI turns an uncaught error into this process exit status.
    """

    exit_code = 1

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


class ConfigurationError(TorusFoldError):
    pass


class UnknownResourceError(TorusFoldError, KeyError):
    def __str__(self):
        return self.message


class AlignmentError(TorusFoldError):
    pass


class BusyError(TorusFoldError):
    pass


class UnsupportedOperationError(TorusFoldError):
    pass


class ExclusivityError(TorusFoldError):
    pass


class StalePlanError(TorusFoldError):
    pass


class ContractViolation(TorusFoldError):
    pass


class TraceValidationError(TorusFoldError):
    pass


class TraceParseError(TorusFoldError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class OracleRefusedError(TorusFoldError):
    exit_code = 3


class SweepFailedError(TorusFoldError):
    exit_code = 2

class LokiError(Exception):
    """Base class for simulator errors."""


class AddressError(LokiError, ValueError):
    pass


class BankBusyError(LokiError):
    """A synapse bank was issued a read while an earlier one was uncollected."""


class GatingViolation(LokiError):
    """A synapse bank clock was enabled twice within its gating window."""


class NotReadyError(LokiError):
    pass


class EmptyReadError(LokiError):
    pass


class CollisionError(LokiError):
    """Neuron memory read and write hit the same bank in one cycle."""


class ConfigError(LokiError, ValueError):
    pass


class CoreBusyError(LokiError):
    pass


class UnconfiguredCoreError(LokiError):
    pass


class ParseError(LokiError, ValueError):
    def __init__(self, msg, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            msg = f"line {lineno}: {msg}"
        super().__init__(msg)


class MissingReportError(LokiError):
    pass

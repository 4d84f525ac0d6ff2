"""Exception hierarchy shared by the construction, the verifier and the CLI"""

from typing import Any, Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator"""


class HistoryError(SimulationError):
    """A change to D would break the d.c.e. journal discipline"""

    def __init__(self, message: str, element: Optional[int] = None, stage: Optional[int] = None):
        super().__init__(message)
        self.element = element
        self.stage = stage


class ThirdChange(HistoryError):
    pass


class WrongKind(HistoryError):
    pass


class StaleStage(HistoryError):
    pass


class Unrestorable(HistoryError):
    pass


class InconsistentAxiom(SimulationError):
    """An axiom contradicts one already in the store; `clash` is the stored axiom"""

    def __init__(self, message: str, clash: Any = None):
        super().__init__(message)
        self.clash = clash


class JournalError(SimulationError):
    pass


class ConfigError(SimulationError):
    pass


class TraceFormatError(SimulationError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        super().__init__(message if line_number is None else f"line {line_number}: {message}")
        self.line_number = line_number

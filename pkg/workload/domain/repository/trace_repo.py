from abc import ABCMeta, abstractmethod
from pathlib import Path

from workload.domain.job import Trace


class ITraceRepository(metaclass=ABCMeta):
    @abstractmethod
    def save(self, trace: Trace, path: Path):
        raise NotImplementedError

    @abstractmethod
    def load(self, path: Path) -> Trace:
        """
        Reads a trace back.
        Malformed records raise TraceParseError naming the line;
        out-of-order arrivals or bad values raise TraceValidationError.
        """
        raise NotImplementedError

from abc import ABCMeta, abstractmethod
from pathlib import Path

from simulator.domain.report import RunReport


class IReportRepository(metaclass=ABCMeta):
    @abstractmethod
    def save(self, report: RunReport, path: Path):
        """Full report as JSON."""
        raise NotImplementedError

    @abstractmethod
    def save_jobs(self, report: RunReport, path: Path):
        """One CSV row per job."""
        raise NotImplementedError

    @abstractmethod
    def load(self, path: Path) -> RunReport:
        raise NotImplementedError

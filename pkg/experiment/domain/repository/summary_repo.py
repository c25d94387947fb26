from abc import ABCMeta, abstractmethod
from pathlib import Path

from experiment.domain.cell_result import CellResult


class ISummaryRepository(metaclass=ABCMeta):
    @abstractmethod
    def save_tables(self, results: list[CellResult], out_dir: Path) -> list[Path]:
        """JCR, JCT and utilization tables, one row per cell and metric."""
        raise NotImplementedError


class IChartRepository(metaclass=ABCMeta):
    @abstractmethod
    def save_charts(self, results: list[CellResult], out_dir: Path) -> list[Path]:
        raise NotImplementedError

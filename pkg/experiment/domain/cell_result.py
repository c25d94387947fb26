from dataclasses import dataclass

from simulator.domain.report import Summary


@dataclass(frozen=True)
class CellResult:
    label: str
    policy: str
    cube: str
    summary: Summary | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.summary is None

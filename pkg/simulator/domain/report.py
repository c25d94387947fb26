from dataclasses import dataclass, field
from common.compat import StrEnum

from shapes.domain.mapping import MappingMode
from workload.domain.job import Shape


class JobStatus(StrEnum):
    COMPLETED = "completed"
    REJECTED = "rejected"


@dataclass
class JobRecord:
    job_id: str
    shape: Shape
    arrival: float
    duration: float
    status: JobStatus | None = None
    start: float | None = None
    finish: float | None = None
    mode: MappingMode | None = None
    cubes_used: int = 0
    circuits_used: int = 0
    variant: str | None = None

    @property
    def jct(self) -> float | None:
        if self.status != JobStatus.COMPLETED:
            return None
        return self.finish - self.arrival


@dataclass
class RunReport:
    policy: str
    spec: str
    seed: int | None
    total_xpus: int
    records: list[JobRecord] = field(default_factory=list)
    # (time, busy fraction) after every event, in event order.
    samples: list[tuple[float, float]] = field(default_factory=list)
    gen_config: dict | None = None

    @property
    def empty_trace(self) -> bool:
        return not self.records

    @property
    def completed(self) -> int:
        return sum(1 for record in self.records if record.status == JobStatus.COMPLETED)

    @property
    def rejected(self) -> int:
        return sum(1 for record in self.records if record.status == JobStatus.REJECTED)

    @property
    def jcr(self) -> float:
        if not self.records:
            return 1.0
        return self.completed / len(self.records)

    @property
    def jcts(self) -> list[float]:
        return [record.jct for record in self.records if record.status == JobStatus.COMPLETED]

    @property
    def horizon(self) -> float:
        if not self.samples:
            return 0.0
        return self.samples[-1][0] - self.samples[0][0]


@dataclass(frozen=True)
class Summary:
    policy: str
    spec: str
    runs: int
    mean_jcr: float
    # Percentile -> mean over runs with at least one completed job.
    jct: dict[int, float]
    jct_runs: int
    mean_utilization: float
    # (percentile, mean utilization at that percentile) for q = 0, 5, ..., 100.
    utilization: list[tuple[int, float]]

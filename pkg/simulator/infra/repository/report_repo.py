import csv
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from shapes.domain.mapping import MappingMode
from simulator.domain.report import JobRecord, JobStatus, RunReport
from simulator.domain.repository.report_repo import IReportRepository
from workload.domain.job import Shape

JOB_COLUMNS = [
    "id",
    "status",
    "arrival_s",
    "start_s",
    "finish_s",
    "mode",
    "cubes_used",
    "circuits_used",
]


class JobRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    shape: tuple[int, int, int]
    status: JobStatus
    arrival_s: float
    duration_s: float
    start_s: float | None = None
    finish_s: float | None = None
    mode: MappingMode | None = None
    cubes_used: int = 0
    circuits_used: int = 0
    variant: str | None = None

    @classmethod
    def from_record(cls, record: JobRecord) -> "JobRow":
        return cls(
            id=record.job_id,
            shape=record.shape.extents,
            status=record.status,
            arrival_s=record.arrival,
            duration_s=record.duration,
            start_s=record.start,
            finish_s=record.finish,
            mode=record.mode,
            cubes_used=record.cubes_used,
            circuits_used=record.circuits_used,
            variant=record.variant,
        )

    def to_record(self) -> JobRecord:
        return JobRecord(
            job_id=self.id,
            shape=Shape.of(self.shape),
            arrival=self.arrival_s,
            duration=self.duration_s,
            status=self.status,
            start=self.start_s,
            finish=self.finish_s,
            mode=self.mode,
            cubes_used=self.cubes_used,
            circuits_used=self.circuits_used,
            variant=self.variant,
        )


class ReportDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    policy: str
    spec: str
    seed: int | None
    total_xpus: int
    jcr: float
    completed: int
    rejected: int
    empty_trace: bool
    horizon_s: float
    gen_config: dict | None = None
    jobs: list[JobRow]
    utilization: list[tuple[float, float]]

    @classmethod
    def from_report(cls, report: RunReport) -> "ReportDocument":
        return cls(
            policy=report.policy,
            spec=report.spec,
            seed=report.seed,
            total_xpus=report.total_xpus,
            jcr=report.jcr,
            completed=report.completed,
            rejected=report.rejected,
            empty_trace=report.empty_trace,
            horizon_s=report.horizon,
            gen_config=report.gen_config,
            jobs=[JobRow.from_record(record) for record in report.records],
            utilization=report.samples,
        )

    def to_report(self) -> RunReport:
        return RunReport(
            policy=self.policy,
            spec=self.spec,
            seed=self.seed,
            total_xpus=self.total_xpus,
            records=[row.to_record() for row in self.jobs],
            samples=[tuple(sample) for sample in self.utilization],
            gen_config=self.gen_config,
        )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class FileReportRepository(IReportRepository):
    def save(self, report: RunReport, path: Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(ReportDocument.from_report(report).model_dump_json(indent=2), encoding="utf-8")

    def save_jobs(self, report: RunReport, path: Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as sink:
            writer = csv.writer(sink, lineterminator="\n")
            writer.writerow(JOB_COLUMNS)
            for record in report.records:
                writer.writerow(
                    _cell(value)
                    for value in (
                        record.job_id,
                        record.status,
                        record.arrival,
                        record.start,
                        record.finish,
                        record.mode,
                        record.cubes_used,
                        record.circuits_used,
                    )
                )

    def load(self, path: Path) -> RunReport:
        return ReportDocument.model_validate_json(Path(path).read_text(encoding="utf-8")).to_report()

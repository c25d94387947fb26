from pathlib import Path

from pydantic import BaseModel, ConfigDict, ValidationError

from common.errors import TraceParseError, TraceValidationError
from workload.domain.job import Job, Shape, Trace
from workload.domain.repository.trace_repo import ITraceRepository


class TraceRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    arrival_s: float
    duration_s: float
    shape: tuple[int, int, int]

    @classmethod
    def from_job(cls, job: Job) -> "TraceRecord":
        return cls(
            id=job.id,
            arrival_s=job.arrival,
            duration_s=job.duration,
            shape=job.shape.extents,
        )

    def to_job(self) -> Job:
        return Job(
            id=self.id,
            arrival=self.arrival_s,
            duration=self.duration_s,
            shape=Shape.of(self.shape),
        )


class JsonlTraceRepository(ITraceRepository):
    def save(self, trace: Trace, path: Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as sink:
            for job in trace:
                sink.write(TraceRecord.from_job(job).model_dump_json())
                sink.write("\n")

    def load(self, path: Path) -> Trace:
        jobs = []
        with Path(path).open("rb") as source:
            for line_no, raw in enumerate(source, start=1):
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError as e:
                    raise TraceParseError(line_no, f"not UTF-8 at byte {e.start}")
                if not line.strip():
                    continue
                try:
                    record = TraceRecord.model_validate_json(line)
                except ValidationError as e:
                    raise TraceParseError(line_no, _first_error(e))
                try:
                    jobs.append(record.to_job())
                except ValueError as e:
                    raise TraceValidationError(f"line {line_no}: {e}")
                except TraceValidationError as e:
                    raise TraceValidationError(f"line {line_no}: {e.message}")

        return Trace(jobs)


def _first_error(error: ValidationError) -> str:
    detail = error.errors()[0]
    location = ".".join(str(part) for part in detail["loc"]) or "record"
    return f"{location}: {detail['msg']}"

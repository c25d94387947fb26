from dataclasses import dataclass, field

from common.errors import TraceValidationError


@dataclass(frozen=True, order=True)
class Shape:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 1:
            raise ValueError(f"shape extents must be positive, got {self.extents}")

    @classmethod
    def of(cls, extents) -> "Shape":
        a, b, c = (int(e) for e in extents)
        return cls(a, b, c)

    @classmethod
    def parse(cls, text: str) -> "Shape":
        return cls.of(text.lower().replace("*", "x").split("x"))

    @property
    def extents(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @property
    def size(self) -> int:
        return self.a * self.b * self.c

    def dims(self) -> int:
        return sum(extent > 1 for extent in self.extents)

    def __iter__(self):
        return iter(self.extents)

    def __getitem__(self, index: int) -> int:
        return self.extents[index]

    def __str__(self):
        return f"{self.a}x{self.b}x{self.c}"


@dataclass(frozen=True)
class Job:
    id: str
    arrival: float
    duration: float
    shape: Shape

    def __post_init__(self):
        if self.arrival < 0:
            raise TraceValidationError(f"job {self.id}: arrival must be non-negative")
        if not self.duration > 0:
            raise TraceValidationError(f"job {self.id}: duration must be positive")

    @property
    def size(self) -> int:
        return self.shape.size


@dataclass
class Trace:
    jobs: list[Job] = field(default_factory=list)

    def __post_init__(self):
        for prev, job in zip(self.jobs, self.jobs[1:]):
            if job.arrival < prev.arrival:
                raise TraceValidationError(
                    f"job {job.id} arrives at {job.arrival} before {prev.id} at {prev.arrival}"
                )
        ids = [job.id for job in self.jobs]
        if len(set(ids)) != len(ids):
            raise TraceValidationError("job ids must be unique")
        # Arrivals are already ordered; this only settles ties by id.
        self.jobs = sorted(self.jobs, key=lambda job: (job.arrival, job.id))

    def __len__(self):
        return len(self.jobs)

    def __iter__(self):
        return iter(self.jobs)

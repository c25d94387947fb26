from dataclasses import dataclass, field
from enum import IntEnum


class EventKind(IntEnum):
    # Departures sort first so a same-instant arrival sees the freed XPUs.
    DEPARTURE = 0
    ARRIVAL = 1


@dataclass(frozen=True, order=True)
class Event:
    time: float
    kind: EventKind
    seq: int
    job_id: str = field(compare=False)

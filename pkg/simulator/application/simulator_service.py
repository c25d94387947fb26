import heapq
import itertools
from collections import deque

from common.logger import logger
from config import Settings, get_settings
from context_vars import run_context
from placement.application.placement_service import PlacementService
from placement.domain.plan import PolicyKind
from simulator.domain.event import Event, EventKind
from simulator.domain.report import JobRecord, JobStatus, RunReport
from topology.domain.cluster_state import ClusterState, build_cluster
from topology.domain.fabric import ClusterSpec
from workload.domain.job import Job, Trace


class SimulatorService:
    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()

    def run(
        self,
        trace: Trace,
        policy: PolicyKind,
        spec: ClusterSpec,
        seed: int | None = None,
        gen_config: dict | None = None,
    ) -> RunReport:
        """
        Replay a trace under FIFO blocking admission: the queue head is placed,
        rejected when it cannot fit even an empty fabric, or else waits for
        the next departure while everything behind it waits too.
        """
        placement = PlacementService(policy, spec)
        token = run_context.set(f"{policy}/{spec.label}/seed={seed}")
        try:
            return self._simulate(trace, placement, spec, seed, gen_config)
        finally:
            run_context.reset(token)

    def _simulate(self, trace, placement, spec, seed, gen_config) -> RunReport:
        state = build_cluster(spec)
        seq = itertools.count()
        events: list[Event] = []
        jobs: dict[str, Job] = {}
        records: dict[str, JobRecord] = {}
        for job in trace:
            jobs[job.id] = job
            records[job.id] = JobRecord(job.id, job.shape, job.arrival, job.duration)
            heapq.heappush(events, Event(job.arrival, EventKind.ARRIVAL, next(seq), job.id))

        report = RunReport(
            policy=str(placement.policy),
            spec=spec.label,
            seed=seed,
            total_xpus=spec.total_xpus,
            records=list(records.values()),
            gen_config=gen_config,
        )
        logger.info(f"simulating {len(jobs)} jobs")

        queue: deque[Job] = deque()
        running: set[str] = set()
        while events:
            event = heapq.heappop(events)
            now = event.time
            if event.kind == EventKind.DEPARTURE:
                state.release(event.job_id)
                running.discard(event.job_id)
                retry = True
            else:
                queue.append(jobs[event.job_id])
                # A blocked head gains nothing from a new arrival behind it.
                retry = len(queue) == 1

            if retry:
                for job_id, finish in self._admit(state, placement, queue, running, records, now):
                    heapq.heappush(events, Event(finish, EventKind.DEPARTURE, next(seq), job_id))

            report.samples.append((now, state.busy_fraction()))
            if self.settings.debug_invariants:
                state.check_invariants()

        logger.info(
            f"done: jcr {report.jcr:.4f}, {report.completed} completed, {report.rejected} rejected"
        )
        return report

    def _admit(
        self,
        state: ClusterState,
        placement: PlacementService,
        queue: deque,
        running: set[str],
        records: dict[str, JobRecord],
        now: float,
    ) -> list[tuple[str, float]]:
        started = []
        while queue:
            job = queue[0]
            record = records[job.id]
            if not placement.feasible_on_empty(job.shape):
                logger.debug(f"{job.id} {job.shape} can never fit; rejected")
                record.status = JobStatus.REJECTED
                queue.popleft()
                continue

            plan = placement.place(state, job.shape)
            if plan is None:
                if running:
                    logger.debug(f"{job.id} {job.shape} waits at the queue head")
                    break
                logger.warning(f"{job.id} {job.shape} does not fit an idle fabric; rejected")
                record.status = JobStatus.REJECTED
                queue.popleft()
                continue

            placement.commit(state, plan, job.id)
            record.status = JobStatus.COMPLETED
            record.start = now
            record.finish = now + job.duration
            record.mode = plan.mode
            record.cubes_used = plan.cost.cubes_used
            record.circuits_used = plan.cost.ocs_circuits_used
            record.variant = plan.variant
            running.add(job.id)
            started.append((job.id, record.finish))
            queue.popleft()
        return started

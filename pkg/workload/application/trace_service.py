from pathlib import Path

import numpy as np

from common.errors import ConfigurationError
from common.logger import logger
from workload.application.shape_sampler import sample_shape, sample_size, shape_filter
from workload.domain.gen_config import GenConfig
from workload.domain.job import Job, Trace
from workload.domain.repository.trace_repo import ITraceRepository

MAX_SIZE_DRAWS = 64


class TraceService:
    def __init__(self, trace_repo: ITraceRepository):
        self.trace_repo = trace_repo

    def generate_trace(self, config: GenConfig) -> Trace:
        if not config.size_scale > 0:
            raise ConfigurationError(f"size_scale must be positive, got {config.size_scale}")
        if config.max_size < 1:
            raise ConfigurationError(f"max_size must be positive, got {config.max_size}")

        rng = np.random.default_rng(config.seed)
        accepts = shape_filter(config.extent_cap, config.footprint_limit)
        width = max(5, len(str(config.job_count)))

        jobs = []
        now = 0.0
        for index in range(config.job_count):
            if index > 0:
                now += config.inter_arrival.sample(rng)
            duration = config.duration.sample(rng)

            for attempt in range(MAX_SIZE_DRAWS):
                size = sample_size(rng, config.size_scale, config.max_size)
                table = config.dims_table(size)
                dims = int(rng.choice(3, p=table.probabilities)) + 1
                shape = sample_shape(size, dims, rng, accepts)
                if accepts(shape):
                    break
            else:
                logger.warning(f"kept unfiltered shape {shape} after {MAX_SIZE_DRAWS} draws")

            jobs.append(
                Job(
                    id=f"job-{index + 1:0{width}d}",
                    arrival=now,
                    duration=max(duration, 1e-6),
                    shape=shape,
                )
            )

        logger.debug(f"generated {len(jobs)} jobs with seed {config.seed}")
        return Trace(jobs)

    def save_trace(self, trace: Trace, path: Path):
        self.trace_repo.save(trace, path)

    def load_trace(self, path: Path) -> Trace:
        return self.trace_repo.load(path)

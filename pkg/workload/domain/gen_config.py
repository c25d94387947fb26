import math
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ExponentialDist(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["exponential"] = "exponential"
    mean: float = Field(gt=0)

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.exponential(self.mean))


class LogNormalDist(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["lognormal"] = "lognormal"
    mu: float
    sigma: float = Field(ge=0)

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.lognormal(self.mu, self.sigma))


class ConstantDist(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant"] = "constant"
    value: float = Field(gt=0)

    def sample(self, rng: np.random.Generator) -> float:
        return self.value


Distribution = Annotated[
    ExponentialDist | LogNormalDist | ConstantDist,
    Field(discriminator="kind"),
]


class DimensionTable(BaseModel):
    """Probability of a job being 1D, 2D or 3D."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    d1: float = Field(ge=0, le=1)
    d2: float = Field(ge=0, le=1)
    d3: float = Field(ge=0, le=1)

    @model_validator(mode="after")
    def check_sum(self):
        if not math.isclose(self.d1 + self.d2 + self.d3, 1.0, abs_tol=1e-9):
            raise ValueError(
                f"probabilities must sum to 1, got {self.d1 + self.d2 + self.d3}"
            )
        return self

    @property
    def probabilities(self) -> list[float]:
        return [self.d1, self.d2, self.d3]


class GenConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    job_count: int = Field(default=500, ge=0)
    inter_arrival: Distribution = ExponentialDist(mean=60.0)
    duration: Distribution = LogNormalDist(mu=7.0, sigma=1.0)
    # Sizes follow an exponential of this scale truncated to [1, max_size].
    size_scale: float = Field(default=64.0, gt=0)
    max_size: int = Field(default=4096, ge=1)
    small_job_threshold: int = Field(default=256, ge=1)
    small_dims: DimensionTable = DimensionTable(d1=0.4, d2=0.4, d3=0.2)
    large_dims: DimensionTable = DimensionTable(d1=0.0, d2=0.5, d3=0.5)
    extent_cap: int | None = Field(default=256, ge=1)
    # (cube edge, cube count): keep shapes whose cube footprint fits the fabric.
    footprint_limit: tuple[int, int] | None = (4, 64)
    seed: int = 1

    def dims_table(self, size: int) -> DimensionTable:
        return self.small_dims if size <= self.small_job_threshold else self.large_dims

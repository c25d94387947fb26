from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict, TomlConfigSettingsSource

from common.errors import ConfigurationError
from placement.domain.plan import PolicyKind
from topology.domain.fabric import ClusterSpec
from workload.domain.gen_config import GenConfig


class Cell(BaseModel):
    """One (policy, fabric) pairing of a sweep."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    policy: PolicyKind
    cube_size: int | None = Field(default=None, ge=1)
    cube_count: int | None = Field(default=None, ge=1)
    static_extents: tuple[int, int, int] | None = None

    @model_validator(mode="after")
    def check_fabric(self):
        if (self.static_extents is None) == (self.cube_size is None):
            raise ValueError("give either static_extents or cube_size/cube_count")
        try:
            self.policy.check(self.spec.validate())
        except ConfigurationError as e:
            raise ValueError(e.message)
        return self

    @property
    def spec(self) -> ClusterSpec:
        if self.static_extents is not None:
            return ClusterSpec.static(*self.static_extents)
        return ClusterSpec.reconfigurable(self.cube_count or 1, self.cube_size)

    @property
    def cube(self) -> str:
        if self.static_extents is not None:
            return "x".join(str(e) for e in self.static_extents)
        return f"{self.cube_size}^3"

    @property
    def label(self) -> str:
        return f"{self.policy}-{self.cube}"


def _cells(policy: PolicyKind, fabrics) -> list[Cell]:
    return [Cell(policy=policy, **fabric) for fabric in fabrics]


# Every fabric holds 4096 XPUs.
STATIC_16 = {"static_extents": (16, 16, 16)}
CUBE_FABRICS = [
    {"cube_size": 2, "cube_count": 512},
    {"cube_size": 4, "cube_count": 64},
    {"cube_size": 8, "cube_count": 8},
]
DEFAULT_CELLS = [
    *_cells(PolicyKind.FIRST_FIT, [STATIC_16]),
    *_cells(PolicyKind.FOLDING, [STATIC_16]),
    *_cells(PolicyKind.RECONFIG, CUBE_FABRICS),
    *_cells(PolicyKind.RFOLD, CUBE_FABRICS),
]


class ExperimentConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="TORUSFOLD_EXPERIMENT_",
        extra="forbid",
        frozen=True,
    )

    cells: list[Cell] = DEFAULT_CELLS
    trials: int = Field(default=100, ge=1)
    gen: GenConfig = GenConfig()
    base_seed: int = 1
    out_dir: Path = Path("results")
    workers: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_unique_cells(self):
        labels = [cell.label for cell in self.cells]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate cells in {labels}")
        return self

    @classmethod
    def load(cls, path: Path | None = None, **overrides) -> "ExperimentConfig":
        """Values from a TOML file, then explicit overrides (CLI flags) on top."""
        if path and not Path(path).is_file():
            raise ConfigurationError(f"config file {path} not found")
        values = dict(TomlConfigSettingsSource(cls, toml_file=Path(path))()) if path else {}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def trial_seed(self, trial: int) -> int:
        return self.base_seed + trial

    def trial_gen(self, trial: int) -> GenConfig:
        return self.gen.model_copy(update={"seed": self.trial_seed(trial)})

from dataclasses import dataclass, field
from common.compat import StrEnum

from common.errors import ConfigurationError, ContractViolation
from shapes.domain.mapping import MappingMode, PlacementMapping
from topology.domain.fabric import ClusterSpec, LinkKind, PortId, XpuId
from workload.domain.job import Shape


class PolicyKind(StrEnum):
    FIRST_FIT = "FirstFit"
    FOLDING = "Folding"
    RECONFIG = "Reconfig"
    RFOLD = "RFold"

    @property
    def static_only(self) -> bool:
        return self in (PolicyKind.FIRST_FIT, PolicyKind.FOLDING)

    def check(self, spec: ClusterSpec):
        if self.static_only != spec.static_mode:
            fabric = "a static torus" if self.static_only else "reconfigurable cubes"
            raise ConfigurationError(f"policy {self} needs {fabric}, got {spec.label}")


@dataclass(frozen=True, order=True)
class PlanCost:
    cubes_used: int
    ocs_circuits_used: int


@dataclass(frozen=True)
class PlacementPlan:
    shape: Shape
    mapping: PlacementMapping
    circuits_to_set: tuple[tuple[PortId, PortId], ...] = ()
    variant: str = "identity"
    target: Shape | None = None
    job_id: str | None = None
    cost: PlanCost = field(init=False)

    def __post_init__(self):
        circuits = sum(1 for link in self.mapping.links if link.kind == LinkKind.CIRCUIT)
        object.__setattr__(self, "cost", PlanCost(len(self.mapping.cubes()), circuits))

    @property
    def mode(self) -> MappingMode:
        return self.mapping.mode

    @property
    def anchor(self) -> XpuId:
        return self.mapping.anchor()

    def rank_key(self) -> tuple:
        return (
            self.mode != MappingMode.RING_COMPLETE,
            self.cost.cubes_used,
            self.cost.ocs_circuits_used,
            self.anchor,
        )


def rank(plans) -> PlacementPlan:
    """Ring-complete plans first, then fewest cubes, then fewest OCS circuits."""
    plans = list(plans)
    if not plans:
        raise ContractViolation("rank needs at least one plan")
    return min(plans, key=PlacementPlan.rank_key)

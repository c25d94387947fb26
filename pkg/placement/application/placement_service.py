from functools import lru_cache

from common.errors import (
    AlignmentError,
    BusyError,
    ContractViolation,
    StalePlanError,
    UnsupportedOperationError,
)
from common.logger import logger
from placement.application.reconfig_placer import reconfig_place, rfold_place
from placement.application.static_placer import first_fit, folding_place
from placement.domain.plan import PlacementPlan, PolicyKind
from shapes.application.mapping_verifier import verify_mapping
from shapes.domain.comm_graph import comm_graph
from topology.domain.cluster_state import ClusterState, build_cluster
from topology.domain.fabric import ClusterSpec
from workload.domain.job import Shape

ROUTINES = {
    PolicyKind.FIRST_FIT: first_fit,
    PolicyKind.FOLDING: folding_place,
    PolicyKind.RECONFIG: reconfig_place,
    PolicyKind.RFOLD: rfold_place,
}


@lru_cache(maxsize=65536)
def feasible_on_empty(policy: PolicyKind, shape: Shape, spec: ClusterSpec) -> bool:
    """Whether the policy can place shape on a pristine fabric."""
    policy.check(spec)
    return ROUTINES[policy](build_cluster(spec), shape) is not None


class PlacementService:
    def __init__(self, policy: PolicyKind, spec: ClusterSpec):
        policy.check(spec)
        self.policy = policy
        self.spec = spec
        self.routine = ROUTINES[policy]

    def place(self, state: ClusterState, shape: Shape) -> PlacementPlan | None:
        """Plan only; the state is left untouched."""
        return self.routine(state, shape)

    def feasible_on_empty(self, shape: Shape) -> bool:
        return feasible_on_empty(self.policy, shape, self.spec)

    def commit(self, state: ClusterState, plan: PlacementPlan, job_id: str | None = None):
        """
        Re-check the plan on a view with its circuits applied, then program the
        circuits and allocate. Raises StalePlanError with the state unchanged
        when the plan no longer holds.
        """
        job_id = job_id or plan.job_id
        if job_id is None:
            raise ContractViolation("commit needs a job id")
        if state.is_view:
            raise ContractViolation("cannot commit onto a planning view")
        view = state.view()
        try:
            for out_port, in_port in plan.circuits_to_set:
                view.set_circuit(out_port, in_port)
        except (AlignmentError, BusyError, UnsupportedOperationError) as e:
            raise StalePlanError(f"plan for {job_id}: {e.message}") from e

        violations = verify_mapping(plan.mapping, comm_graph(plan.shape), view)
        if violations:
            detail = "; ".join(f"{v.kind}: {v.detail}" for v in violations[:3])
            raise StalePlanError(f"plan for {job_id} is stale: {detail}")

        for out_port, in_port in plan.circuits_to_set:
            state.set_circuit(out_port, in_port)
        state.allocate(job_id, plan.mapping.xpus, plan.mapping.links)
        logger.debug(
            f"committed {job_id} {plan.shape} on {len(plan.mapping.cubes())} cube(s), "
            f"{len(plan.circuits_to_set)} new circuit(s)"
        )

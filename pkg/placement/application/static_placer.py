import numpy as np

from common.logger import logger
from placement.application.plan_builder import assign_variant, plan_from_assignment, plan_from_walk
from placement.domain.plan import PlacementPlan
from shapes.application.cycle_search import FreeGraph, find_cycle, find_path
from shapes.application.fold_service import enumerate_folds
from shapes.domain.fold import FoldContext, FoldKind, FoldVariant
from shapes.domain.mapping import MappingMode
from topology.domain.cluster_state import ClusterState
from topology.domain.fabric import XpuId
from utils.block_scan import first_free_anchor
from workload.domain.job import Shape


def _place_block(state: ClusterState, shape: Shape, variant: FoldVariant, mode: MappingMode) -> PlacementPlan | None:
    anchor = first_free_anchor(state.busy_mask[0], variant.target.extents)
    if anchor is None:
        return None
    origin = np.array(anchor)
    xpu_of = assign_variant(
        variant, lambda targets: [XpuId(0, *(int(v) for v in t)) for t in targets + origin]
    )
    return plan_from_assignment(
        state, shape, xpu_of, mode, variant=variant.label, target=variant.target
    )


def first_fit(state: ClusterState, shape: Shape) -> PlacementPlan | None:
    """The first free block of some rotation, rotations in order, anchors lexicographic."""
    context = FoldContext.of(state.spec)
    for variant in enumerate_folds(shape, context):
        if variant.kind not in (FoldKind.IDENTITY, FoldKind.ROTATION):
            continue
        plan = _place_block(state, shape, variant, None)
        if plan is not None:
            logger.debug(f"first-fit placed {shape} as {variant.target} at {plan.anchor}")
            return plan
    return None


def folding_place(state: ClusterState, shape: Shape) -> PlacementPlan | None:
    """
    Every fold variant whose rings close in a free block, then a free cycle
    for 1D jobs; failing those, the same again accepting open rings.
    """
    context = FoldContext.of(state.spec)
    variants = enumerate_folds(shape, context)
    graph = FreeGraph(state) if shape.dims() == 1 else None

    for mode in (MappingMode.RING_COMPLETE, MappingMode.LINE_COMPLETE):
        for variant in variants:
            if variant.mode_in(context) != mode:
                continue
            plan = _place_block(state, shape, variant, mode)
            if plan is not None:
                logger.debug(f"folding placed {shape} as {variant.label} {variant.target}")
                return plan

        if graph is not None:
            if mode == MappingMode.RING_COMPLETE:
                walk = find_cycle(graph, shape.size)
            else:
                walk = find_path(graph, shape.size)
            if walk is not None:
                plan = plan_from_walk(state, shape, walk, mode)
                if plan is not None:
                    logger.debug(f"folding placed {shape} on a free {plan.mode} walk")
                    return plan
    return None

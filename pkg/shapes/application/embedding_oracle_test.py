import itertools

import pytest

from common.errors import OracleRefusedError
from shapes.application.embedding_oracle import brute_force_embeddable, torus_graph
from shapes.application.fold_service import enumerate_folds
from shapes.domain.mapping import MappingMode
from workload.domain.job import Shape

RING = MappingMode.RING_COMPLETE
LINE = MappingMode.LINE_COMPLETE


def test_torus_graph_edges():
    graph = torus_graph((4, 4, 1), (True, False, False))

    assert graph.number_of_nodes() == 16
    assert graph.has_edge((3, 0, 0), (0, 0, 0))
    assert not graph.has_edge((0, 3, 0), (0, 0, 0))


def test_extent_two_wrap_is_a_parallel_link():
    graph = torus_graph((2, 1, 1), (True, False, False))

    assert graph.number_of_edges((0, 0, 0), (1, 0, 0)) == 2


def test_two_dimensional_fold_with_wrapped_x():
    assert brute_force_embeddable(Shape(1, 6, 4), (4, 2, 3), (True, False, False), RING)


def test_two_dimensional_fold_needs_the_wrap():
    # Corner XPUs of an unwrapped 4x2x3 block have three links; every node
    # of a 6x4 job sits on two rings and needs four.
    assert not brute_force_embeddable(Shape(1, 6, 4), (4, 2, 3), (False, False, False), RING)
    assert brute_force_embeddable(Shape(1, 6, 4), (4, 2, 3), (False, False, False), LINE)


def test_middle_layer_cannot_fold():
    assert not brute_force_embeddable(Shape(1, 8, 3), (1, 4, 6), (False, False, True), RING)


def test_odd_ring_in_even_grid():
    assert not brute_force_embeddable(Shape(5, 1, 1), (4, 4, 1), (True, True, False), RING)
    assert brute_force_embeddable(Shape(5, 1, 1), (4, 4, 1), (True, True, False), LINE)


def test_oversized_job_is_refused():
    with pytest.raises(OracleRefusedError):
        brute_force_embeddable(Shape(5, 5, 1), (5, 5, 1), (True, True, False), RING)


def test_target_too_small():
    assert not brute_force_embeddable(Shape(2, 2, 2), (2, 2, 1), (True, True, True), LINE)


@pytest.mark.parametrize(
    "extents",
    [e for e in itertools.product(range(1, 17), repeat=3) if e[0] * e[1] * e[2] <= 16 and e[0] >= e[1] >= e[2]],
)
def test_catalogue_agrees_with_oracle(extents):
    shape = Shape.of(extents)
    for variant in enumerate_folds(shape):
        wraps = variant.closure_wrap_dims | variant.required_wrap_dims
        flags = tuple(d in wraps for d in range(3))
        assert brute_force_embeddable(shape, variant.target.extents, flags, RING), variant.label

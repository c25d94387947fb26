import numpy as np

from utils.block_scan import first_free_anchor, free_anchor_mask, free_anchors, occupancy_table


def test_empty_grid_every_anchor_is_free():
    busy = np.zeros((4, 4, 4), dtype=bool)

    mask = free_anchor_mask(busy, (2, 2, 2))

    assert mask.shape == (3, 3, 3)
    assert mask.all()


def test_block_that_does_not_fit():
    busy = np.zeros((4, 4, 4), dtype=bool)

    assert first_free_anchor(busy, (5, 1, 1)) is None
    assert free_anchors(busy, (1, 5, 1)) == []


def test_busy_cell_excludes_overlapping_anchors():
    busy = np.zeros((4, 4, 1), dtype=bool)
    busy[0, 0, 0] = True

    assert first_free_anchor(busy, (2, 2, 1)) == (0, 1, 0)
    assert (0, 0, 0) not in free_anchors(busy, (2, 2, 1))


def test_leading_axis_is_scanned_first():
    busy = np.zeros((2, 4, 4, 4), dtype=bool)
    busy[0] = True
    busy[1, :, :, :2] = True

    assert first_free_anchor(busy, (4, 4, 2)) == (1, 0, 0, 2)


def test_brute_force_agreement():
    rng = np.random.default_rng(0)
    busy = rng.random((5, 4, 3)) < 0.3

    mask = free_anchor_mask(busy, (2, 2, 1))

    for x in range(4):
        for y in range(3):
            for z in range(3):
                assert mask[x, y, z] == (not busy[x : x + 2, y : y + 2, z : z + 1].any())


def test_shared_table_gives_the_same_masks():
    rng = np.random.default_rng(3)
    busy = rng.random((2, 4, 8, 4)) < 0.2
    table = occupancy_table(busy)

    assert table.shape == (2, 5, 9, 5)
    assert table[1, -1, -1, -1] == busy[1].sum()
    for extents in [(1, 1, 1), (2, 3, 1), (4, 8, 4), (3, 2, 2)]:
        assert np.array_equal(free_anchor_mask(busy, extents, table), free_anchor_mask(busy, extents))

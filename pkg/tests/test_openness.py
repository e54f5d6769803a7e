import numpy as np

from services.assembly import (
    ArrayUnionFind,
    assemble,
    box_family,
    box_family_positions,
    openness_stats,
    unique_subbox_grid,
)
from services.lattice import LatticeConfig, sample_labeling
from services.profile import shatter

from tests.conftest import constant, line


def test_union_find_groups():
    uf = ArrayUnionFind(6)
    uf.union(0, 1)
    uf.union(4, 5)
    uf.union(1, 5)
    assert uf.find(4) == 0
    assert [g.tolist() for g in uf.groups(np.arange(6))] == [[0, 1, 4, 5], [2], [3]]


def test_union_find_pairs_batch():
    uf = ArrayUnionFind(8)
    uf.union_pairs(np.array([7, 5, 3, 1]), np.array([6, 4, 2, 0]))
    uf.union_pairs(np.array([6, 2]), np.array([5, 1]))
    assert uf.roots().tolist() == [0, 0, 0, 0, 4, 4, 4, 4]
    assert [g.tolist() for g in uf.groups(np.array([5, 1, 6]))] == [[1], [5, 6]]
    assert uf.groups(np.array([], dtype=np.int64)) == []


def test_box_family_covers_lattice():
    config = LatticeConfig(d=2, n=11, q=2, r=2)
    positions = box_family_positions(config)
    assert positions == [0, 2, 4, 6, 7]
    covered = np.zeros(config.shape, dtype=bool)
    for corner in box_family(config):
        covered[tuple(slice(c, c + 4) for c in corner)] = True
    assert covered.all()


def test_box_family_small_lattice():
    config = LatticeConfig(d=2, n=3, q=2, r=2)
    assert box_family(config) == [(0, 0)]


def test_unique_grid_distinct_labels():
    sigma = line([1, 2, 3, 4, 5, 6], q=64)
    assert unique_subbox_grid(sigma).all()


def test_openness_distinct_labels():
    stats = openness_stats(line([1, 2, 3, 4, 5, 6], q=64))
    assert stats.open_fraction == 1.0
    assert stats.closed_component_count == 0
    assert stats.max_closed_component_diameter == 0
    assert stats.corner_cluster_fraction == 1.0
    assert stats.box_count == 2


def test_openness_constant():
    config = LatticeConfig(d=2, n=8, q=2, r=2)
    stats = openness_stats(constant(config))
    assert stats.open_fraction == 0.0
    assert stats.closed_component_count == 1
    assert stats.max_closed_component_diameter == config.n
    assert stats.corner_cluster_fraction == 0.0
    assert stats.box_count == 9


def test_openness_constant_3d_large():
    config = LatticeConfig(d=3, n=64, q=2, r=2)
    stats = openness_stats(constant(config))
    assert stats.box_count == 31 ** 3
    assert stats.open_fraction == 0.0
    assert stats.closed_component_count == 1
    assert stats.max_closed_component_diameter == 64
    assert stats.corner_cluster_fraction == 0.0


def test_openness_record_keys():
    config = LatticeConfig(d=2, n=10, q=3, r=2)
    record = openness_stats(sample_labeling(config, 0)).to_dict()
    assert set(record) == {
        "open_fraction", "closed_component_count", "max_closed_component_diameter",
        "corner_cluster_fraction", "box_count",
    }
    assert 0.0 <= record["open_fraction"] <= 1.0


def test_all_open_labeling_is_assembled():
    config = LatticeConfig(d=2, n=12, q=4, r=4)
    checked = 0
    for seed in range(20):
        sigma = sample_labeling(config, seed)
        if openness_stats(sigma).open_fraction < 1.0:
            continue
        checked += 1
        result, _ = assemble(shatter(sigma))
        assert result == sigma
    assert checked > 0

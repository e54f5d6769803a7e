import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from services.lattice import (
    BoxRegion,
    InvalidConfigError,
    Labeling,
    LatticeConfig,
    Pattern,
    PatternShapeError,
    RegionOutOfBoundsError,
    decode_pattern,
    derive_seed,
    encode_pattern,
    enumerate_boxes,
    extract_pattern,
    linear_index,
    make_rng,
    sample_labeling,
    shift_labeling,
    vertex_at,
)
from services.lattice.codec import CodecError

from tests.conftest import constant, line


# === LatticeConfig ===

def test_config_rejects_single_letter_alphabet():
    with pytest.raises(InvalidConfigError):
        LatticeConfig(d=1, n=4, q=1, r=2)


@pytest.mark.parametrize("kwargs", [
    dict(d=0, n=4, q=2, r=2),
    dict(d=5, n=4, q=2, r=2),
    dict(d=1, n=4, q=257, r=2),
    dict(d=1, n=4, q=2, r=1),
    dict(d=1, n=3, q=2, r=4),
    dict(d=4, n=2 ** 20, q=2, r=2),
])
def test_config_invariants(kwargs):
    with pytest.raises(InvalidConfigError):
        LatticeConfig(**kwargs)


def test_config_counts():
    config = LatticeConfig(d=2, n=5, q=3, r=2)
    assert config.vertex_count == 25
    assert config.shard_count == 16
    assert config.shape == (5, 5)
    assert config.box_shape == (2, 2)


def test_linear_index_round_trip():
    config = LatticeConfig(d=3, n=4, q=2, r=2)
    assert linear_index(config, (0, 0, 1)) == 1
    assert linear_index(config, (1, 0, 0)) == 16
    for i in range(config.vertex_count):
        assert linear_index(config, vertex_at(config, i)) == i


# === sample_labeling ===

def test_sample_is_deterministic():
    config = LatticeConfig(d=2, n=8, q=5, r=2)
    assert sample_labeling(config, 42) == sample_labeling(config, 42)
    assert sample_labeling(config, 42) != sample_labeling(config, 43)


def test_sample_label_frequency():
    config = LatticeConfig(d=2, n=64, q=2, r=2)
    ones = sum(
        int(np.count_nonzero(sample_labeling(config, seed).codes == 0))
        for seed in range(1000)
    )
    assert abs(ones / (1000 * config.vertex_count) - 0.5) <= 0.02


def test_rng_streams_are_independent():
    a = make_rng(7, 1, 2).integers(0, 2 ** 32, size=8)
    b = make_rng(7, 1, 3).integers(0, 2 ** 32, size=8)
    assert not np.array_equal(a, b)
    assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
    assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)


# === extract_pattern ===

def test_extract_constant_region():
    config = LatticeConfig(d=2, n=5, q=3, r=2)
    p = extract_pattern(constant(config, 3), BoxRegion((1, 2), (3, 2)))
    assert (p.values() == 3).all()
    assert p.sides == (3, 2)


def test_region_contains():
    outer = BoxRegion((1, 2), (4, 3))
    assert outer.contains(BoxRegion.cube((1, 2), 3))
    assert outer.contains(BoxRegion((2, 3), (3, 2)))
    assert outer.contains(outer)
    assert not outer.contains(BoxRegion.cube((3, 2), 3))
    assert not outer.contains(BoxRegion.cube((0, 2), 2))


def test_extract_1d_direct_read():
    p = extract_pattern(line([1, 2, 3, 4]), BoxRegion.cube((1,), 2))
    assert p.values().tolist() == [2, 3]


def test_extract_out_of_bounds():
    with pytest.raises(RegionOutOfBoundsError):
        extract_pattern(line([1, 2, 3, 4]), BoxRegion.cube((3,), 2))


def test_sub_extraction_composes():
    config = LatticeConfig(d=2, n=7, q=4, r=2)
    sigma = sample_labeling(config, 3)
    outer = extract_pattern(sigma, BoxRegion((1, 2), (4, 4)))
    inner = outer.sub_pattern((1, 1), (2, 3))
    assert inner == extract_pattern(sigma, BoxRegion((2, 3), (2, 3)))


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2 ** 32),
    cx=st.integers(0, 3),
    cy=st.integers(0, 3),
)
def test_extract_commutes_with_translation(seed, cx, cy):
    config = LatticeConfig(d=2, n=6, q=3, r=3)
    sigma = sample_labeling(config, seed)
    region = BoxRegion.cube((cx, cy), 3)
    shifted = shift_labeling(sigma, (cx, cy))
    assert extract_pattern(sigma, region) == extract_pattern(shifted, BoxRegion.cube((0, 0), 3))


# === enumerate_boxes ===

def test_enumerate_boxes_small():
    config = LatticeConfig(d=2, n=3, q=2, r=2)
    boxes = enumerate_boxes(config, 2)
    assert [b.corner for b in boxes] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_enumerate_single_box_when_n_equals_r():
    for d in (1, 2, 3):
        config = LatticeConfig(d=d, n=3, q=2, r=3)
        assert len(enumerate_boxes(config, 3)) == 1


def test_enumerate_boxes_3d():
    config = LatticeConfig(d=3, n=5, q=2, r=2)
    assert len(enumerate_boxes(config, 2)) == 64


def test_enumerate_boxes_exhaustive_counts():
    for d in (1, 2, 3):
        for n in range(2, 13):
            for r in range(2, n + 1):
                config = LatticeConfig(d=d, n=n, q=2, r=r)
                boxes = enumerate_boxes(config, r)
                assert len(boxes) == (n - r + 1) ** d
                assert len({b.corner for b in boxes}) == len(boxes)


def test_enumerate_boxes_side_out_of_range():
    config = LatticeConfig(d=1, n=4, q=2, r=2)
    with pytest.raises(RegionOutOfBoundsError):
        enumerate_boxes(config, 5)


# === encode_pattern ===

def test_encode_1d():
    p = Pattern.from_values([1, 3])
    assert encode_pattern(p) == bytes([0x01, 0x02, 0x00, 0x00, 0x02])


def test_encode_2d_constant():
    p = Pattern.from_values([[1, 1], [1, 1]])
    assert encode_pattern(p) == bytes([0x02, 0x02, 0x00, 0x02, 0x00, 0, 0, 0, 0])


def test_encode_masked():
    p = Pattern.from_values([0, 2], mask=[False, True])
    assert encode_pattern(p) == bytes([0x81, 0x02, 0x00, 0x02, 0x01])


def test_masked_cells_ignored_by_equality():
    a = Pattern.from_values([1, 2, 3], mask=[True, False, True])
    b = Pattern.from_values([1, 4, 3], mask=[True, False, True])
    assert a == b
    assert a != Pattern.from_values([1, 2, 3])


def test_all_true_mask_is_full_pattern():
    p = Pattern.from_values([1, 2], mask=[True, True])
    assert not p.is_masked
    assert p == Pattern.from_values([1, 2])


def test_decode_rejects_trailing_bytes():
    data = encode_pattern(Pattern.from_values([1, 2])) + b"\x00"
    with pytest.raises(PatternShapeError):
        decode_pattern(data)


def test_decode_rejects_truncated():
    with pytest.raises(CodecError):
        decode_pattern(bytes([0x02, 0x02, 0x00, 0x02, 0x00, 0, 0]))


patterns_2d = st.tuples(st.integers(1, 3), st.integers(1, 3)).flatmap(
    lambda shape: st.tuples(
        st.lists(st.integers(1, 256), min_size=shape[0] * shape[1], max_size=shape[0] * shape[1]),
        st.lists(st.booleans(), min_size=shape[0] * shape[1], max_size=shape[0] * shape[1]),
        st.just(shape),
    )
)


@settings(max_examples=100, deadline=None)
@given(patterns_2d, st.booleans())
def test_encoding_round_trip(data, use_mask):
    values, mask, shape = data
    values = np.array(values).reshape(shape)
    mask = np.array(mask).reshape(shape) if use_mask else None
    p = Pattern.from_values(values, mask=mask)
    assert decode_pattern(encode_pattern(p)) == p


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(1, 4), min_size=4, max_size=4),
    st.lists(st.integers(1, 4), min_size=4, max_size=4),
)
def test_encoding_injective(a, b):
    pa = Pattern.from_values(np.array(a).reshape(2, 2))
    pb = Pattern.from_values(np.array(b).reshape(2, 2))
    assert (pa == pb) == (a == b)


# === Labeling ===

def test_labeling_rejects_labels_above_q():
    config = LatticeConfig(d=1, n=3, q=2, r=2)
    with pytest.raises(InvalidConfigError):
        Labeling.from_values(config, [1, 2, 3])


def test_labeling_windows_shape():
    config = LatticeConfig(d=2, n=5, q=3, r=2)
    sigma = sample_labeling(config, 1)
    assert sigma.windows(2).shape == (16, 4)
    assert sigma.windows(2)[0].tolist() == sigma.codes[:2, :2].ravel().tolist()


def test_labeling_is_read_only():
    sigma = line([1, 2, 3, 4])
    with pytest.raises(ValueError):
        sigma.codes[0] = 2

import itertools

import numpy as np
import pytest

from services.assembly import (
    AssemblyError,
    FailureReason,
    PartialLabeling,
    assemble,
    build_subbox_index,
    corner_candidates,
    extend_from_unique,
    is_unique_subbox,
    step1_corner,
    step2_percolate,
    step3_finish,
)
from services.lattice import (
    BoxRegion,
    Labeling,
    LatticeConfig,
    Pattern,
    PatternShapeError,
    sample_labeling,
)
from services.profile import Profile, shatter
from services.spoiler import brute_force_identifiable, identifiable_census

from tests.conftest import all_labelings, constant, line


def _profile(values, q=4, r=2) -> Profile:
    return shatter(line(values, q=q, r=r))


# === build_subbox_index ===

def test_index_offsets_1d():
    profile = _profile([1, 2, 3])
    index = build_subbox_index(profile)
    key = index.key_of(np.array([1], dtype=np.uint8))
    occ = index.occurrences(key)
    assert [k for k, _ in occ[0]] == [Pattern.from_values([2, 3]).encode()]
    assert [k for k, _ in occ[1]] == [Pattern.from_values([1, 2]).encode()]


def test_index_totals_sum():
    config = LatticeConfig(d=2, n=7, q=3, r=3)
    profile = shatter(sample_labeling(config, 0))
    index = build_subbox_index(profile)
    total = sum(int(t.sum()) for t in index.totals.values())
    assert total == 2 ** config.d * config.shard_count


def test_index_constant():
    config = LatticeConfig(d=2, n=6, q=2, r=3)
    index = build_subbox_index(shatter(constant(config)))
    assert len(index.totals) == 1
    (counts,) = index.totals.values()
    assert counts.tolist() == [config.shard_count] * 4


# === is_unique_subbox ===

def test_unique_corner_label():
    index = build_subbox_index(_profile([1, 2, 3, 4]))
    assert is_unique_subbox(Pattern.from_values([1]), index)


def test_unique_absent_pattern():
    index = build_subbox_index(_profile([1, 2, 3, 1]))
    assert not is_unique_subbox(Pattern.from_values([4]), index)



def test_unique_interior():
    index = build_subbox_index(_profile([1, 2, 3, 4]))
    assert is_unique_subbox(Pattern.from_values([2]), index)


def test_not_unique_repeated():
    index = build_subbox_index(_profile([1, 2, 1, 2, 1], q=2))
    assert not is_unique_subbox(Pattern.from_values([1]), index)


def test_unique_wrong_shape():
    index = build_subbox_index(_profile([1, 2, 3, 4]))
    with pytest.raises(PatternShapeError):
        is_unique_subbox(Pattern.from_values([1, 2]), index)


# === step1_corner ===

def test_step1_1d(sigma_1234):
    profile = shatter(sigma_1234)
    index = build_subbox_index(profile)
    assert corner_candidates(index) == [index.key_of(np.array([0], dtype=np.uint8))]
    partial = step1_corner(profile, index)
    assert partial.values().tolist() == [1, 2, 3, 4]


def test_step1_constant_has_no_corner():
    config = LatticeConfig(d=2, n=6, q=2, r=2)
    profile = shatter(constant(config))
    with pytest.raises(AssemblyError) as e:
        step1_corner(profile, build_subbox_index(profile))
    assert e.value.reason == FailureReason.CORNER_NOT_FOUND


def test_step1_only_inside_corner_region():
    sigma = line(list(range(1, 13)), q=16)
    profile = shatter(sigma)
    partial = step1_corner(profile, build_subbox_index(profile))
    assert partial.values()[:4].tolist() == [1, 2, 3, 4]
    assert (partial.values()[4:] == 0).all()


def test_step1_completes_via_step3_when_lattice_is_corner():
    # n <= 2r: перколяция останавливается на [1,1,2], остальное достраивает шаг 3
    sigma = line([1, 1, 2, 1, 2, 1], q=2, r=3)
    profile = shatter(sigma)
    partial = step1_corner(profile, build_subbox_index(profile))
    assert partial.values().tolist() == [1, 1, 2, 1, 2, 1]
    assert partial.step3_filled == 3
    result, report = assemble(profile)
    assert result == sigma
    assert report.determined_after_step[0] == 6


# === extend_from_unique ===

def test_extend_determines_neighbour(sigma_1234):
    profile = shatter(sigma_1234)
    index = build_subbox_index(profile)
    partial = PartialLabeling(profile.config)
    partial.write((0,), np.array([0]))
    written = extend_from_unique(partial, BoxRegion.cube((0,), 1), profile, index)
    assert written == 1
    assert partial.values().tolist() == [1, 2, 0, 0]


def test_extend_absent_pattern_is_noop():
    profile = _profile([1, 2, 3, 1])
    index = build_subbox_index(profile)
    partial = PartialLabeling(profile.config)
    partial.write((1,), np.array([3]))  # метки 4 нет ни в одном шарде
    assert extend_from_unique(partial, BoxRegion.cube((1,), 1), profile, index) == 0



def test_extend_is_idempotent(sigma_1234):
    profile = shatter(sigma_1234)
    index = build_subbox_index(profile)
    partial = PartialLabeling(profile.config)
    partial.write((1,), np.array([1]))
    A = BoxRegion.cube((1,), 1)
    extend_from_unique(partial, A, profile, index)
    before = partial.labels.copy()
    assert extend_from_unique(partial, A, profile, index) == 0
    assert np.array_equal(before, partial.labels)


def test_extend_requires_determined_box(sigma_1234):
    profile = shatter(sigma_1234)
    partial = PartialLabeling(profile.config)
    with pytest.raises(PatternShapeError):
        extend_from_unique(partial, BoxRegion.cube((0,), 1), profile, build_subbox_index(profile))


def test_conflicting_write():
    partial = PartialLabeling(LatticeConfig(d=1, n=4, q=4, r=2))
    partial.write((0,), np.array([0, 1]))
    with pytest.raises(AssemblyError) as e:
        partial.write((1,), np.array([2]))
    assert e.value.reason == FailureReason.CONFLICT


# === step2 / step3 ===

def test_step2_completes_1d(sigma_1234):
    profile = shatter(sigma_1234)
    index = build_subbox_index(profile)
    partial = step2_percolate(step1_corner(profile, index), profile, index)
    assert partial.is_complete


def test_step2_constant_forged_corner_makes_no_progress():
    config = LatticeConfig(d=2, n=6, q=2, r=2)
    profile = shatter(constant(config))
    index = build_subbox_index(profile)
    partial = PartialLabeling(config)
    partial.write((0, 0), np.zeros((2, 2), dtype=np.int16))
    step2_percolate(partial, profile, index)
    assert partial.determined_count == 4


def test_step2_order_invariance():
    config = LatticeConfig(d=2, n=16, q=3, r=2)
    for seed in range(50):
        profile = shatter(sample_labeling(config, seed))
        index = build_subbox_index(profile)
        try:
            start = step1_corner(profile, index)
        except AssemblyError:
            continue
        masks = []
        for discipline in ("fifo", "lifo", "random"):
            partial = start.copy()
            step2_percolate(
                partial, profile, index, discipline=discipline,
                rng=np.random.default_rng(seed),
            )
            masks.append(partial.determined)
        assert np.array_equal(masks[0], masks[1])
        assert np.array_equal(masks[0], masks[2])


def test_step3_identity_when_complete(sigma_1234):
    profile = shatter(sigma_1234)
    index = build_subbox_index(profile)
    partial = step2_percolate(step1_corner(profile, index), profile, index)
    before = partial.labels.copy()
    step3_finish(partial, profile, index)
    assert np.array_equal(before, partial.labels)
    assert partial.step3_filled == 0


def test_step3_needs_agreement():
    # шарды 12, 21, 13: после метки 1 стоит то 2, то 3
    profile = shatter(line([1, 2, 1, 3]))
    partial = PartialLabeling(profile.config)
    partial.write((2,), np.array([0]))
    step3_finish(partial, profile)
    assert partial.values().tolist() == [1, 2, 1, 0]
    assert partial.step3_filled == 2



def test_step3_within_region_leaves_outside_undetermined():
    profile = shatter(line([1, 1, 2, 1, 2, 1], q=2, r=3))
    partial = PartialLabeling(profile.config)
    partial.write((0,), np.array([0, 0, 1]))
    step3_finish(partial, profile, within=BoxRegion.cube((0,), 4))
    assert partial.values().tolist() == [1, 1, 2, 1, 0, 0]


def test_step3_unique_completion():
    # σ = [1,3,2,4,2]: шарды 13,32,24,42; метка 3 встречается только в 13 и 32
    sigma = line([1, 3, 2, 4, 2])
    profile = shatter(sigma)
    partial = PartialLabeling(profile.config)
    partial.write((1,), np.array([2]))
    step3_finish(partial, profile)
    assert partial.values().tolist()[:3] == [1, 3, 2]
    assert partial.step3_filled >= 2


def test_step3_fills_from_rectangle():
    # определён уникальный 2-прямоугольник, v заполняется по единственному образу
    config = LatticeConfig(d=2, n=4, q=16, r=2)
    values = np.arange(1, 17).reshape(4, 4)
    sigma = Labeling.from_values(config, values)
    profile = shatter(sigma)
    partial = PartialLabeling(config)
    partial.write((1, 1), sigma.codes[1:2, 1:3].astype(np.int16))
    step3_finish(partial, profile)
    assert partial.values()[2, 1] == values[2, 1]
    assert partial.values()[2, 2] == values[2, 2]
    assert (partial.values()[partial.determined] == values[partial.determined]).all()


# === assemble ===

def test_assemble_single_shard():
    config = LatticeConfig(d=2, n=3, q=4, r=3)
    sigma = sample_labeling(config, 8)
    result, report = assemble(shatter(sigma))
    assert result == sigma
    assert report.success


def test_assemble_1d(sigma_1234):
    result, report = assemble(shatter(sigma_1234))
    assert result == sigma_1234
    assert report.determined_after_step == (4, 4, 4)
    assert report.failure_reason is None


def test_assemble_fails_on_twins(twin_pair):
    a, b = twin_pair
    for sigma in (a, b):
        result, report = assemble(shatter(sigma))
        assert result is None
        assert not report.success
        assert report.failure_reason is not None


def test_assemble_report_dict(twin_pair):
    _, report = assemble(shatter(twin_pair[0]))
    record = report.to_dict()
    assert set(record) == {
        "success", "determined_after_step", "step2_explored_boxes",
        "step3_filled", "failure_reason",
    }
    assert record["failure_reason"] == "corner-not-found"
    steps = record["determined_after_step"]
    assert steps == sorted(steps)


def test_assemble_rejects_symmetric_profile():
    from services.symmetry import shatter_symmetric

    profile = shatter_symmetric(line([1, 2, 3, 4]))
    with pytest.raises(PatternShapeError):
        assemble(profile)


@pytest.mark.parametrize("n,r", [(4, 2), (5, 2), (6, 2), (4, 3), (5, 3), (6, 3)])
def test_assemble_sound_exhaustive_1d(n, r):
    config = LatticeConfig(d=1, n=n, q=2, r=r)
    for sigma in all_labelings(config):
        result, report = assemble(shatter(sigma))
        if result is not None:
            assert result == sigma
            assert report.success
            assert brute_force_identifiable(config, sigma)


def test_assemble_sound_exhaustive_2d():
    config = LatticeConfig(d=2, n=3, q=2, r=2)
    census = identifiable_census(config)
    for index, sigma in enumerate(all_labelings(config)):
        result, _ = assemble(shatter(sigma))
        if result is not None:
            assert result == sigma
            assert census[index]


def test_assemble_exhaustive_d1_n6_r3_subset_of_identifiable():
    config = LatticeConfig(d=1, n=6, q=2, r=3)
    successes = 0
    for sigma in all_labelings(config):
        result, _ = assemble(shatter(sigma))
        if result is not None:
            successes += 1
            assert brute_force_identifiable(config, sigma)
    assert successes > 0


def test_assemble_pivots_are_unique():
    config = LatticeConfig(d=2, n=12, q=4, r=3)
    profile = shatter(sample_labeling(config, 5))
    index = build_subbox_index(profile)
    seen = []
    assemble(profile, on_pivot=lambda corner, p: seen.append(p))
    assert all(is_unique_subbox(p, index) for p in seen)


def test_determined_monotone():
    config = LatticeConfig(d=2, n=16, q=4, r=3)
    for seed in range(10):
        _, report = assemble(shatter(sample_labeling(config, seed)))
        a, b, c = report.determined_after_step
        assert a <= b <= c <= config.vertex_count
        assert report.success == (c == config.vertex_count)


def test_step1_on_2d_unique_labels():
    config = LatticeConfig(d=2, n=6, q=36, r=2)
    values = np.arange(1, 37).reshape(6, 6)
    sigma = Labeling.from_values(config, values)
    profile = shatter(sigma)
    partial = step1_corner(profile, build_subbox_index(profile))
    assert np.array_equal(partial.values()[:4, :4], values[:4, :4])
    result, _ = assemble(profile)
    assert result == sigma


def test_all_binary_1d_assemble_never_mislabels():
    for n in (4, 5):
        for values in itertools.product((1, 2), repeat=n):
            sigma = line(list(values), q=2)
            result, _ = assemble(shatter(sigma))
            assert result is None or result == sigma

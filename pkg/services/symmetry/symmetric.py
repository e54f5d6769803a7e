"""
Symmetric Mode
Наблюдения с точностью до поворотов/отражений r-бокса, восстановление
с точностью до изоморфизма Λ_n
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from config.settings import SPOIL_BUDGET, SPOIL_MAX_SIZE, SPOIL_SEED
from services.assembly import (
    AssemblyError,
    AssemblyReport,
    FailureReason,
    PartialLabeling,
    SubboxIndex,
    build_subbox_index,
    corner_offsets,
    grow_corner,
    run_assembly,
)
from services.lattice import (
    ConfigMismatchError,
    InvalidConfigError,
    Labeling,
    PatternShapeError,
    make_rng,
)
from services.lattice.codec import pattern_header
from services.profile import Profile, count_rows
from services.spoiler import (
    SearchMetrics,
    SwapCertificate1D,
    SwapCertificateND,
    find_interval_swap,
    find_multiset_swap,
)

from .transforms import (
    BoxTransform,
    all_transforms,
    automorphism_batch,
    canonical_batch,
    transform_labeling,
)

logger = logging.getLogger(__name__)

# роли (B1, B3, B4, B6) среди I_1..I_8: I_2..I_7 играют роль I_1..I_6
SYMMETRIC_ROLES = (1, 3, 4, 6)


def shatter_symmetric(labeling: Labeling) -> Profile:
    """shatter, где каждый шард заменён на canonical_form"""
    config = labeling.config
    rows = labeling.windows(config.r)
    shards = rows.reshape((rows.shape[0],) + config.box_shape)
    canonical = canonical_batch(shards).reshape(rows.shape[0], -1)
    return Profile(config, count_rows(config, canonical), symmetric=True)


def equal_up_to_isomorphism(a: Labeling, b: Labeling) -> bool:
    """True iff b = a ∘ g для некоторого преобразования g ∈ гипероктаэдральной группы"""
    if a.config != b.config:
        raise ConfigMismatchError(
            f"Разные конфигурации: {a.config.to_dict()} vs {b.config.to_dict()}"
        )
    return any(
        transform_labeling(a, t) == b
        for t in all_transforms(a.config.d)
    )


def verify_nonidentifiable_symmetric(a: Labeling, b: Labeling) -> bool:
    """True iff a и b не изоморфны, а их symmetric профили совпадают"""
    if equal_up_to_isomorphism(a, b):
        return False
    return shatter_symmetric(a) == shatter_symmetric(b)


# ============================================================================
# ASSEMBLY
# ============================================================================

def build_symmetric_index(profile: Profile) -> SubboxIndex:
    return build_subbox_index(profile, orientations=all_transforms(profile.config.d))


def corner_classes(profile: Profile) -> Dict[bytes, Tuple[int, int, int]]:
    """
    Канонические классы (r-1)-подбоксов шардов

    Returns:
        ключ класса -> (суммарное число вхождений, индекс шарда, индекс смещения
        первого вхождения)
    """
    config = profile.config
    codes, mults = profile.shard_array()
    side = config.r - 1
    header = pattern_header((side,) * config.d)

    classes: Dict[bytes, Tuple[int, int, int]] = {}
    for e_idx, offset in enumerate(corner_offsets(config.d)):
        region = (slice(None),) + tuple(slice(o, o + side) for o in offset)
        subs = np.ascontiguousarray(codes[region])
        canon = canonical_batch(subs).reshape(subs.shape[0], -1)
        for shard_idx in range(subs.shape[0]):
            key = header + canon[shard_idx].tobytes()
            count, first_shard, first_offset = classes.get(key, (0, shard_idx, e_idx))
            classes[key] = (count + int(mults[shard_idx]), first_shard, first_offset)
    return classes


def step1_corner_symmetric(
        profile: Profile,
        index: SubboxIndex,
        on_pivot=None
) -> PartialLabeling:
    """
    Шаг 1 в symmetric режиме

    Класс (r-1)-подбокса, встречающийся ровно один раз среди всех шардов,
    лежит в углу Λ_n. Угол выбирается произвольно (начало координат):
    шард записывается в ориентации, переводящей этот подбокс в смещение 0.
    """
    config = profile.config
    classes = corner_classes(profile)
    candidates = sorted(key for key, (count, _, _) in classes.items() if count == 1)
    if not candidates:
        raise AssemblyError(
            FailureReason.CORNER_NOT_FOUND,
            "Нет класса (r-1)-подбокса с единственным вхождением",
        )

    _, shard_idx, e_idx = classes[candidates[0]]
    offset = corner_offsets(config.d)[e_idx]
    codes, _ = profile.shard_array()
    orient = BoxTransform(tuple(range(config.d)), tuple(o == 1 for o in offset))

    partial = PartialLabeling(config)
    partial.write((0,) * config.d, orient.apply(codes[shard_idx]))
    logger.debug(f"Шаг 1 (symmetric): кандидатов {len(candidates)}, якорь в начале координат")
    return grow_corner(partial, profile, index, on_pivot=on_pivot)


def assemble_symmetric(
        profile: Profile,
        discipline: str = "fifo",
        rng: Optional[np.random.Generator] = None,
        on_pivot=None
) -> Tuple[Optional[Labeling], AssemblyReport]:
    """
    Собрать разметку по symmetric профилю

    При успехе результат изоморфен истинной разметке.

    Returns:
        (Labeling или None, AssemblyReport)
    """
    if not profile.symmetric:
        raise PatternShapeError("Oriented профиль: используйте assemble")

    index = build_symmetric_index(profile)
    labeling, report = run_assembly(
        profile, index, step1_corner_symmetric, shatter_symmetric,
        discipline=discipline, rng=rng, on_pivot=on_pivot,
    )
    logger.debug(f"assemble_symmetric: {report.to_dict()}")
    return labeling, report


# ============================================================================
# SPOILERS
# ============================================================================

def spoil_1d_symmetric(labeling: Labeling) -> Optional[SwapCertificate1D]:
    """
    Обмен интервалов для d = 1 в symmetric режиме (восемь интервалов)

    Требует, чтобы σ|_{I_1} не был изоморфен σ|_{I_8}; результат
    проверяется на неизоморфность исходной разметке.

    Raises:
        InvalidConfigError: d != 1 или n < 8r
    """
    config = labeling.config
    if config.d != 1:
        raise InvalidConfigError(f"spoil_1d_symmetric только для d=1, получено d={config.d}")
    if config.n < 8 * config.r:
        raise InvalidConfigError(f"Нужно n >= 8r, получено n={config.n}, r={config.r}")

    m = config.n // 8
    codes = labeling.codes
    first = codes[:m]
    last = codes[7 * m:8 * m]
    if np.array_equal(first, last) or np.array_equal(first, last[::-1]):
        logger.debug("spoil_1d_symmetric: σ|I1 изоморфен σ|I8")
        return None

    return find_interval_swap(
        labeling, 8, SYMMETRIC_ROLES, verify_nonidentifiable_symmetric, symmetric=True
    )


def find_symmetric_swap(
        labeling: Labeling,
        max_size: int = SPOIL_MAX_SIZE,
        budget: int = SPOIL_BUDGET,
        seed: int = SPOIL_SEED,
        metrics: Optional[SearchMetrics] = None
) -> Optional[SwapCertificateND]:
    """
    Обмен меток в symmetric режиме

    Сертификат принимается, только если переставленная разметка не
    изоморфна исходной.
    """
    return find_multiset_swap(
        labeling,
        max_size=max_size,
        budget=budget,
        seed=seed,
        verify=verify_nonidentifiable_symmetric,
        metrics=metrics,
        symmetric=True,
    )


def automorphism_frequency(d: int, q: int, side: int, samples: int, seed: int = 0) -> float:
    """Доля равномерно случайных паттернов side^d с нетривиальным автоморфизмом"""
    rng = make_rng(seed, d, q, side, samples)
    codes = rng.integers(0, q, size=(samples,) + (side,) * d, dtype=np.uint8)
    return float(automorphism_batch(codes).mean())


def automorphism_bound(d: int, q: int, side: int) -> float:
    """Оценка 2^d * q^(-side^d / 2)"""
    return (2 ** d) * q ** (-(side ** d) / 2)

"""
Subbox Index
Индекс (r-1)-подбоксов шардов: для каждого (r-1)-паттерна и каждого из 2^d
угловых смещений e ∈ {0,1}^d — какие образы шардов содержат его на смещении e

Единственный источник информации для ассемблера: строится только из Profile.
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from services.lattice import Pattern, PatternShapeError
from services.lattice.codec import pattern_header
from services.profile import Profile

logger = logging.getLogger(__name__)


@dataclass
class SubboxIndex:
    """
    Индекс подбоксов

    images: (M, r, ..., r) — варианты шардов, которые могут стоять в решётке
        (oriented: сами шарды; symmetric: все различные ориентации каждого шарда)
    image_mults: кратность шарда-источника для каждого образа
    image_shards: индекс шарда-источника (порядок Profile.counts)
    entries[key][e]: список (image_idx, кратность) с паттерном key на смещении e
    totals[key][e]: суммарная кратность по смещению e
    """

    r: int
    d: int
    offsets: Tuple[Tuple[int, ...], ...]
    images: np.ndarray
    image_mults: np.ndarray
    image_shards: np.ndarray
    shard_keys: Tuple[bytes, ...]
    entries: Dict[bytes, List[List[Tuple[int, int]]]]
    totals: Dict[bytes, np.ndarray]
    orientations: Optional[Tuple] = None
    sub_header: bytes = field(default=b"")

    @property
    def symmetric(self) -> bool:
        return self.orientations is not None

    def key_of(self, codes: np.ndarray) -> bytes:
        """Ключ (r-1)-паттерна по массиву кодов"""
        return self.sub_header + np.ascontiguousarray(codes, dtype=np.uint8).tobytes()

    def counts_for(self, key: bytes) -> np.ndarray:
        got = self.totals.get(key)
        if got is None:
            return np.zeros(len(self.offsets), dtype=np.int64)
        return got

    def occurrences(self, key: bytes) -> List[List[Tuple[bytes, int]]]:
        """Для каждого смещения: (ключ шарда, кратность)"""
        found = self.entries.get(key)
        if found is None:
            return [[] for _ in self.offsets]
        return [
            [(self.shard_keys[self.image_shards[idx]], mult) for idx, mult in per_offset]
            for per_offset in found
        ]

    def has_automorphism(self, codes: np.ndarray) -> bool:
        """Есть ли у паттерна нетождественная симметрия из orientations"""
        if self.orientations is None:
            return False
        return any(
            np.array_equal(t.apply(codes), codes)
            for t in self.orientations
            if not t.is_identity
        )


def corner_offsets(d: int) -> Tuple[Tuple[int, ...], ...]:
    """2^d смещений {0,1}^d в row-major порядке (первое — нулевое)"""
    return tuple(itertools.product((0, 1), repeat=d))


def _oriented_images(
        codes: np.ndarray,
        mults: np.ndarray,
        orientations: Sequence
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Все различные ориентации каждого шарда"""
    images, image_mults, image_shards = [], [], []
    for idx in range(codes.shape[0]):
        seen = set()
        for t in orientations:
            img = np.ascontiguousarray(t.apply(codes[idx]))
            raw = img.tobytes()
            if raw in seen:
                continue
            seen.add(raw)
            images.append(img)
            image_mults.append(int(mults[idx]))
            image_shards.append(idx)
    return (
        np.stack(images),
        np.asarray(image_mults, dtype=np.int64),
        np.asarray(image_shards, dtype=np.int64),
    )


def build_subbox_index(profile: Profile, orientations: Optional[Sequence] = None) -> SubboxIndex:
    """
    Построить индекс (r-1)-подбоксов

    Args:
        profile: Профиль шардов
        orientations: Группа преобразований бокса для symmetric режима
            (None — oriented режим)

    Returns:
        SubboxIndex: сумма totals по всем ключам и смещениям = 2^d * сумма кратностей образов
    """
    config = profile.config
    r, d = config.r, config.d
    codes, mults = profile.shard_array()
    shard_keys = tuple(profile.counts.keys())

    if orientations is None:
        images = codes
        image_mults = mults
        image_shards = np.arange(codes.shape[0], dtype=np.int64)
    else:
        orientations = tuple(orientations)
        images, image_mults, image_shards = _oriented_images(codes, mults, orientations)

    offsets = corner_offsets(d)
    sub_header = pattern_header((r - 1,) * d)
    width = len(offsets)

    entries: Dict[bytes, List[List[Tuple[int, int]]]] = defaultdict(
        lambda: [[] for _ in range(width)]
    )
    totals: Dict[bytes, np.ndarray] = {}

    count = images.shape[0]
    for e_idx, offset in enumerate(offsets):
        region = (slice(None),) + tuple(slice(o, o + r - 1) for o in offset)
        subs = np.ascontiguousarray(images[region]).reshape(count, -1)
        for img_idx in range(count):
            key = sub_header + subs[img_idx].tobytes()
            mult = int(image_mults[img_idx])
            entries[key][e_idx].append((img_idx, mult))
            if key not in totals:
                totals[key] = np.zeros(width, dtype=np.int64)
            totals[key][e_idx] += mult

    logger.debug(
        f"SubboxIndex: {count} образов, {len(totals)} различных (r-1)-паттернов, "
        f"{'symmetric' if orientations is not None else 'oriented'}"
    )

    return SubboxIndex(
        r=r,
        d=d,
        offsets=offsets,
        images=images,
        image_mults=image_mults,
        image_shards=image_shards,
        shard_keys=shard_keys,
        entries=dict(entries),
        totals=totals,
        orientations=orientations,
        sub_header=sub_header,
    )


def is_unique_subbox(pattern: Pattern, index: SubboxIndex) -> bool:
    """
    Наблюдаемый прокси уникальности (r-1)-паттерна

    True iff на каждом из 2^d смещений паттерн встречается <= 1 раза
    и хотя бы на одном >= 1. В symmetric режиме паттерн дополнительно
    не должен иметь автоморфизмов.
    """
    expected = (index.r - 1,) * index.d
    if pattern.is_masked or pattern.sides != expected:
        raise PatternShapeError(
            f"Ожидался полный паттерн со сторонами {expected}, получено {pattern.sides}"
        )
    return unique_codes(pattern.cells, index)


def unique_codes(codes: np.ndarray, index: SubboxIndex) -> bool:
    """is_unique_subbox по массиву кодов (без проверки формы)"""
    counts = index.counts_for(index.key_of(codes))
    if counts.max() != 1:
        return False
    if index.symmetric and index.has_automorphism(codes):
        return False
    return True

"""
Box Transforms
Гипероктаэдральная группа: перестановки осей + отражения (2^d * d! элементов)

Соглашение: преобразование действует на позиции,
    t(x)_i = flip_i(x_{perm[i]}),   flip_i(y) = s - 1 - y если flips[i], иначе y
и transform_pattern(p, t)[t(x)] = p[x].
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from services.lattice import (
    ConfigMismatchError,
    Labeling,
    Pattern,
    PatternShapeError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoxTransform:
    """Элемент гипероктаэдральной группы"""

    perm: Tuple[int, ...]
    flips: Tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        object.__setattr__(self, "flips", tuple(bool(f) for f in self.flips))
        if sorted(self.perm) != list(range(len(self.perm))):
            raise PatternShapeError(f"perm {self.perm} не является перестановкой")
        if len(self.flips) != len(self.perm):
            raise PatternShapeError("Длины perm и flips не совпадают")

    @classmethod
    def identity(cls, d: int) -> "BoxTransform":
        return cls(tuple(range(d)), (False,) * d)

    @property
    def d(self) -> int:
        return len(self.perm)

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.d)) and not any(self.flips)

    def compose(self, other: "BoxTransform") -> "BoxTransform":
        """self ∘ other (сначала other, потом self)"""
        if other.d != self.d:
            raise PatternShapeError("Композиция преобразований разной размерности")
        perm = tuple(other.perm[self.perm[i]] for i in range(self.d))
        flips = tuple(self.flips[i] ^ other.flips[self.perm[i]] for i in range(self.d))
        return BoxTransform(perm, flips)

    def __matmul__(self, other: "BoxTransform") -> "BoxTransform":
        return self.compose(other)

    def inverse(self) -> "BoxTransform":
        inv = [0] * self.d
        for i, p in enumerate(self.perm):
            inv[p] = i
        flips = tuple(self.flips[inv[j]] for j in range(self.d))
        return BoxTransform(tuple(inv), flips)

    def map_position(self, x, sides) -> Tuple[int, ...]:
        """t(x) внутри бокса со сторонами sides"""
        out = []
        for i in range(self.d):
            y = x[self.perm[i]]
            side = sides[self.perm[i]]
            out.append(side - 1 - y if self.flips[i] else y)
        return tuple(out)

    def apply(self, array: np.ndarray, leading: int = 0) -> np.ndarray:
        """
        Применить к массиву (последние d осей), leading первых осей — батч

        Returns:
            view (без копирования)
        """
        axes = tuple(range(leading)) + tuple(leading + p for p in self.perm)
        out = np.transpose(array, axes)
        flipped = tuple(leading + i for i, f in enumerate(self.flips) if f)
        if flipped:
            out = np.flip(out, axis=flipped)
        return out

    def to_dict(self) -> dict:
        return {"perm": list(self.perm), "flips": list(self.flips)}


@lru_cache(maxsize=None)
def all_transforms(d: int) -> Tuple[BoxTransform, ...]:
    """Все 2^d * d! элементов; тождественное — первым"""
    if d < 1:
        raise PatternShapeError(f"d={d} должен быть >= 1")
    return tuple(
        BoxTransform(perm, flips)
        for perm in itertools.permutations(range(d))
        for flips in itertools.product((False, True), repeat=d)
    )


def _check_sides(pattern: Pattern, t: BoxTransform):
    if t.d != pattern.d:
        raise PatternShapeError(f"Преобразование d={t.d} для паттерна d={pattern.d}")
    sides = pattern.sides
    if any(sides[t.perm[i]] != sides[i] for i in range(t.d)):
        raise PatternShapeError(
            f"Стороны {sides} не инвариантны относительно перестановки {t.perm}"
        )


def transform_pattern(pattern: Pattern, t: BoxTransform) -> Pattern:
    """Образ паттерна: позиция x переходит в t(x)"""
    _check_sides(pattern, t)
    mask = None if pattern.mask is None else t.apply(pattern.mask)
    return Pattern(t.apply(pattern.cells), mask)


def orbit(pattern: Pattern) -> List[Pattern]:
    """Все образы паттерна (с повторами), в порядке all_transforms"""
    return [transform_pattern(pattern, t) for t in all_transforms(pattern.d)]


def canonical_form(pattern: Pattern) -> Pattern:
    """Элемент орбиты с лексикографически минимальной кодировкой"""
    if not pattern.is_cubic:
        raise PatternShapeError(f"canonical_form требует кубический паттерн: {pattern.sides}")
    return min(orbit(pattern), key=lambda p: p.encode())


def has_automorphism(pattern: Pattern) -> bool:
    """True если некоторое нетождественное преобразование сохраняет паттерн"""
    if not pattern.is_cubic:
        raise PatternShapeError(f"has_automorphism требует кубический паттерн: {pattern.sides}")
    key = pattern.encode()
    return any(
        transform_pattern(pattern, t).encode() == key
        for t in all_transforms(pattern.d)[1:]
    )


# ============================================================================
# BATCHED (массивы кодов формы (N, s, ..., s))
# ============================================================================

def _lexicographic_less(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Построчное a < b (лексикографически) для матриц (N, L)"""
    diff = a != b
    first = diff.argmax(axis=1)
    rows = np.arange(a.shape[0])
    return diff.any(axis=1) & (a[rows, first] < b[rows, first])


def canonical_batch(codes: np.ndarray) -> np.ndarray:
    """
    canonical_form для батча полных кубических паттернов одинаковой формы

    Для одинаковых сторон порядок кодировок совпадает с лексикографическим
    порядком ячеек, поэтому достаточно сравнивать строки кодов.
    """
    n_items = codes.shape[0]
    d = codes.ndim - 1
    best = np.ascontiguousarray(codes).reshape(n_items, -1).copy()
    for t in all_transforms(d)[1:]:
        image = np.ascontiguousarray(t.apply(codes, leading=1)).reshape(n_items, -1)
        less = _lexicographic_less(image, best)
        best[less] = image[less]
    return best.reshape(codes.shape)


def automorphism_batch(codes: np.ndarray) -> np.ndarray:
    """has_automorphism для батча: bool массив формы (N,)"""
    n_items = codes.shape[0]
    d = codes.ndim - 1
    flat = np.ascontiguousarray(codes).reshape(n_items, -1)
    result = np.zeros(n_items, dtype=bool)
    for t in all_transforms(d)[1:]:
        image = np.ascontiguousarray(t.apply(codes, leading=1)).reshape(n_items, -1)
        result |= (image == flat).all(axis=1)
    return result


def transform_labeling(labeling: Labeling, t: BoxTransform) -> Labeling:
    """Глобальное преобразование Λ_n: σ'(t(x)) = σ(x)"""
    if t.d != labeling.config.d:
        raise ConfigMismatchError(
            f"Преобразование d={t.d} для разметки d={labeling.config.d}"
        )
    return Labeling(labeling.config, t.apply(labeling.codes))

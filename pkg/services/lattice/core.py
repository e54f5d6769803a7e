"""
Lattice Core
Конфигурация задачи, вершины, разметка решётки и извлечение паттернов

Соглашения:
- координаты 0-based, row-major (последняя координата меняется быстрее всех)
- метки на уровне API: 1..q, внутри хранятся коды 0..q-1 (uint8)
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .codec import encode_cells, parse_encoding
from .rng import make_rng

logger = logging.getLogger(__name__)

Vertex = Tuple[int, ...]

MAX_DIMENSION = 4
MAX_ALPHABET = 256
MAX_COUNT = 2 ** 62


# ============================================================================
# ERRORS
# ============================================================================

class LatticeError(Exception):
    """Базовая ошибка пакета"""
    pass


class InvalidConfigError(LatticeError, ValueError):
    """Невалидные параметры (d, n, q, r)"""
    pass


class RegionOutOfBoundsError(LatticeError, ValueError):
    """Бокс или вершина выходит за пределы Λ_n"""
    pass


class PatternShapeError(LatticeError, ValueError):
    """Форма паттерна не подходит для операции"""
    pass


class ConfigMismatchError(LatticeError, ValueError):
    """Сравниваются объекты с разной конфигурацией"""
    pass


# ============================================================================
# CONFIG
# ============================================================================

@dataclass(frozen=True)
class LatticeConfig:
    """Параметры задачи: размерность d, сторона n, алфавит q, сторона наблюдения r"""

    d: int
    n: int
    q: int
    r: int

    def __post_init__(self):
        errors = []

        for name in ("d", "n", "q", "r"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidConfigError(f"{name} должен быть целым, получено {value!r}")
            object.__setattr__(self, name, int(value))

        if not 1 <= self.d <= MAX_DIMENSION:
            errors.append(f"d={self.d} вне диапазона [1, {MAX_DIMENSION}]")
        if not 2 <= self.q <= MAX_ALPHABET:
            errors.append(f"q={self.q} вне диапазона [2, {MAX_ALPHABET}]")
        if self.r < 2:
            errors.append(f"r={self.r} должен быть >= 2")
        if self.n < self.r:
            errors.append(f"n={self.n} должен быть >= r={self.r}")

        if not errors and self.n ** self.d > MAX_COUNT:
            errors.append(f"n^d = {self.n}^{self.d} слишком велико")

        if errors:
            raise InvalidConfigError("; ".join(errors))

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def box_shape(self) -> Tuple[int, ...]:
        return (self.r,) * self.d

    @property
    def vertex_count(self) -> int:
        return self.n ** self.d

    @property
    def shard_count(self) -> int:
        return (self.n - self.r + 1) ** self.d

    def to_dict(self) -> dict:
        return {"d": self.d, "n": self.n, "q": self.q, "r": self.r}


def check_vertex(config: LatticeConfig, vertex: Sequence[int]) -> Vertex:
    """Проверить, что вершина лежит в Λ_n, и вернуть её как tuple"""
    v = tuple(int(x) for x in vertex)
    if len(v) != config.d or any(x < 0 or x >= config.n for x in v):
        raise RegionOutOfBoundsError(f"Вершина {v} вне Λ_{config.n} (d={config.d})")
    return v


def linear_index(config: LatticeConfig, vertex: Sequence[int]) -> int:
    """Row-major индекс вершины"""
    v = check_vertex(config, vertex)
    return int(np.ravel_multi_index(v, config.shape))


def vertex_at(config: LatticeConfig, index: int) -> Vertex:
    """Вершина по row-major индексу"""
    if not 0 <= index < config.vertex_count:
        raise RegionOutOfBoundsError(f"Индекс {index} вне [0, {config.vertex_count})")
    return tuple(int(x) for x in np.unravel_index(index, config.shape))


# ============================================================================
# REGIONS
# ============================================================================

@dataclass(frozen=True)
class BoxRegion:
    """Прямоугольный бокс: минимальный угол + длины сторон"""

    corner: Vertex
    sides: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "corner", tuple(int(c) for c in self.corner))
        object.__setattr__(self, "sides", tuple(int(s) for s in self.sides))
        if len(self.corner) != len(self.sides):
            raise PatternShapeError(
                f"Размерность угла {self.corner} не совпадает со сторонами {self.sides}"
            )
        if any(s < 1 for s in self.sides):
            raise PatternShapeError(f"Стороны бокса должны быть >= 1: {self.sides}")

    @classmethod
    def cube(cls, corner: Sequence[int], side: int) -> "BoxRegion":
        """s-бокс с углом corner"""
        return cls(tuple(corner), (side,) * len(corner))

    @property
    def d(self) -> int:
        return len(self.sides)

    @property
    def end(self) -> Vertex:
        """Наибольший угол (включительно)"""
        return tuple(c + s - 1 for c, s in zip(self.corner, self.sides))

    @property
    def size(self) -> int:
        return int(np.prod(self.sides))

    def slices(self) -> Tuple[slice, ...]:
        return tuple(slice(c, c + s) for c, s in zip(self.corner, self.sides))

    def is_within(self, config: LatticeConfig) -> bool:
        return (
            self.d == config.d
            and all(c >= 0 for c in self.corner)
            and all(e < config.n for e in self.end)
        )

    def contains(self, other: "BoxRegion") -> bool:
        """other целиком внутри self"""
        return all(a <= b for a, b in zip(self.corner, other.corner)) and all(
            b <= a for a, b in zip(self.end, other.end)
        )

    def intersect(self, other: "BoxRegion") -> Optional["BoxRegion"]:
        lo = tuple(max(a, b) for a, b in zip(self.corner, other.corner))
        hi = tuple(min(a, b) for a, b in zip(self.end, other.end))
        if any(h < l for l, h in zip(lo, hi)):
            return None
        return BoxRegion(lo, tuple(h - l + 1 for l, h in zip(lo, hi)))


# ============================================================================
# PATTERN
# ============================================================================

class Pattern:
    """
    Паттерн меток на боксе, перенесённом в начало координат

    cells хранит коды (label - 1) в форме сторон; mask (если есть)
    отмечает присутствующие ячейки. Отсутствующие ячейки не участвуют
    ни в сравнении, ни в кодировании.
    """

    __slots__ = ("_cells", "_mask", "_key")

    def __init__(self, cells: np.ndarray, mask: Optional[np.ndarray] = None):
        cells = np.array(cells, dtype=np.uint8)
        if not 1 <= cells.ndim <= MAX_DIMENSION or cells.size == 0:
            raise PatternShapeError(f"Невалидная форма паттерна: {cells.shape}")

        if mask is not None:
            mask = np.array(mask, dtype=bool)
            if mask.shape != cells.shape:
                raise PatternShapeError(
                    f"Форма маски {mask.shape} не совпадает с {cells.shape}"
                )
            if mask.all():
                mask = None
            else:
                cells = np.where(mask, cells, 0).astype(np.uint8)
                mask.flags.writeable = False

        cells.flags.writeable = False
        self._cells = cells
        self._mask = mask
        self._key: Optional[bytes] = None

    @classmethod
    def from_values(
            cls,
            values,
            mask: Optional[np.ndarray] = None
    ) -> "Pattern":
        """
        Построить паттерн из 1-based меток (вложенные списки или массив)

        Ячейки под маской могут содержать любое значение (например 0).
        """
        arr = np.asarray(values, dtype=np.int64)
        if mask is not None:
            mask_arr = np.asarray(mask, dtype=bool)
            arr = np.where(mask_arr, arr, 1)
        if arr.size and (arr.min() < 1 or arr.max() > MAX_ALPHABET):
            raise PatternShapeError("Метки паттерна должны быть в [1, 256]")
        return cls((arr - 1).astype(np.uint8), mask)

    @property
    def sides(self) -> Tuple[int, ...]:
        return self._cells.shape

    @property
    def d(self) -> int:
        return self._cells.ndim

    @property
    def cells(self) -> np.ndarray:
        """Коды 0..q-1 (только чтение)"""
        return self._cells

    @property
    def mask(self) -> Optional[np.ndarray]:
        return self._mask

    @property
    def is_masked(self) -> bool:
        return self._mask is not None

    @property
    def is_cubic(self) -> bool:
        return len(set(self.sides)) == 1

    def values(self) -> np.ndarray:
        """1-based метки; ячейки под маской = 0"""
        out = self._cells.astype(np.int64) + 1
        if self._mask is not None:
            out[~self._mask] = 0
        return out

    def encode(self) -> bytes:
        if self._key is None:
            self._key = encode_cells(self._cells, self._mask)
        return self._key

    def sub_pattern(self, offset: Sequence[int], sides: Sequence[int]) -> "Pattern":
        """Под-паттерн с углом offset (в координатах паттерна)"""
        region = BoxRegion(tuple(offset), tuple(sides))
        if any(c < 0 for c in region.corner) or any(
                e >= s for e, s in zip(region.end, self.sides)
        ):
            raise RegionOutOfBoundsError(f"{region} вне паттерна {self.sides}")
        mask = None if self._mask is None else self._mask[region.slices()]
        return Pattern(self._cells[region.slices()], mask)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.encode() == other.encode()

    def __hash__(self) -> int:
        return hash(self.encode())

    def __repr__(self) -> str:
        kind = "masked" if self.is_masked else "full"
        return f"Pattern(sides={self.sides}, {kind}, values={self.values().tolist()})"


def encode_pattern(pattern: Pattern) -> bytes:
    """Каноничный бинарный ключ паттерна (см. services.lattice.codec)"""
    return pattern.encode()


def decode_pattern(data: bytes) -> Pattern:
    """Обратная операция к encode_pattern"""
    codes, mask, end = parse_encoding(data)
    if end != len(data):
        raise PatternShapeError(f"Лишние {len(data) - end} байт после паттерна")
    return Pattern(codes, mask)


# ============================================================================
# LABELING
# ============================================================================

class Labeling:
    """Полная разметка Λ_n; неизменяема после создания"""

    __slots__ = ("config", "_codes")

    def __init__(self, config: LatticeConfig, codes: np.ndarray):
        codes = np.array(codes, dtype=np.uint8)
        if codes.size != config.vertex_count:
            raise InvalidConfigError(
                f"Ожидалось {config.vertex_count} меток, получено {codes.size}"
            )
        codes = codes.reshape(config.shape)
        if codes.size and int(codes.max()) >= config.q:
            raise InvalidConfigError(f"Метка вне [1, {config.q}]")
        codes.flags.writeable = False
        self.config = config
        self._codes = codes

    @classmethod
    def from_values(cls, config: LatticeConfig, values) -> "Labeling":
        """Разметка из 1-based меток (плоский список в row-major или массив формы n^d)"""
        arr = np.asarray(values, dtype=np.int64)
        if arr.size and (arr.min() < 1 or arr.max() > config.q):
            raise InvalidConfigError(f"Метки должны быть в [1, {config.q}]")
        return cls(config, (arr - 1).astype(np.uint8))

    @property
    def codes(self) -> np.ndarray:
        """Коды 0..q-1 формы (n,)*d (только чтение)"""
        return self._codes

    def values(self) -> np.ndarray:
        """1-based метки формы (n,)*d"""
        return self._codes.astype(np.int64) + 1

    def label_at(self, vertex: Sequence[int]) -> int:
        v = check_vertex(self.config, vertex)
        return int(self._codes[v]) + 1

    def windows(self, side: int) -> np.ndarray:
        """
        Все s-боксы как массив (n-s+1)^d x s^d в row-major порядке углов

        Returns:
            view формы (количество боксов, s^d)
        """
        d = self.config.d
        view = sliding_window_view(self._codes, (side,) * d)
        return view.reshape(-1, side ** d)

    def to_bytes(self) -> bytes:
        return self._codes.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Labeling):
            return NotImplemented
        return self.config == other.config and np.array_equal(self._codes, other._codes)

    def __hash__(self) -> int:
        return hash((self.config, self._codes.tobytes()))

    def __repr__(self) -> str:
        c = self.config
        return f"Labeling(d={c.d}, n={c.n}, q={c.q}, r={c.r})"


def shift_labeling(labeling: Labeling, shift: Sequence[int]) -> Labeling:
    """Циклический сдвиг разметки (используется в проверках трансляционной инвариантности)"""
    axes = tuple(range(labeling.config.d))
    rolled = np.roll(labeling.codes, tuple(-int(s) for s in shift), axis=axes)
    return Labeling(labeling.config, rolled)


# ============================================================================
# OPERATIONS
# ============================================================================

def sample_labeling(config: LatticeConfig, seed: int) -> Labeling:
    """
    Сгенерировать i.i.d. равномерную разметку

    Детерминирована по (config, seed): Philox поток seed -> (d, n, q, r).
    """
    rng = make_rng(seed, config.d, config.n, config.q, config.r)
    codes = rng.integers(0, config.q, size=config.shape, dtype=np.uint8)
    return Labeling(config, codes)


def extract_pattern(labeling: Labeling, region: BoxRegion) -> Pattern:
    """Паттерн σ|_B, перенесённый в начало координат (τ_B)"""
    if not region.is_within(labeling.config):
        raise RegionOutOfBoundsError(f"{region} вне Λ_{labeling.config.n}")
    return Pattern(labeling.codes[region.slices()])


def box_corners(config: LatticeConfig, side: int) -> List[Vertex]:
    """Углы всех s-боксов в row-major порядке"""
    if not 1 <= side <= config.n:
        raise RegionOutOfBoundsError(f"s={side} вне [1, {config.n}]")
    span = range(config.n - side + 1)
    return list(itertools.product(span, repeat=config.d))


def enumerate_boxes(config: LatticeConfig, s: int) -> List[BoxRegion]:
    """Все s-боксы Λ_n, ровно (n-s+1)^d штук, в row-major порядке углов"""
    return [BoxRegion.cube(corner, s) for corner in box_corners(config, s)]

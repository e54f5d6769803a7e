"""
Assembler
Восстановление разметки по профилю шардов (три шага)

Шаг 1: угол Λ_{r-1} по (r-1)-паттерну, который встречается только на нулевом
       смещении; рост до Λ_{2r} расширениями и достройкой внутри Λ_{2r}.
Шаг 2: перколяция уникальных (r-1)-боксов (worklist).
Шаг 3: достройка по частично определённым r-боксам (единственное
       согласованное дополнение), чередуется с шагом 2 до неподвижной точки.

Каждая записанная метка вынуждена профилем: если профиль = shatter(σ)
и сборка успешна, результат равен σ.
"""

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from services.lattice import (
    BoxRegion,
    Labeling,
    LatticeConfig,
    LatticeError,
    Pattern,
    PatternShapeError,
    RegionOutOfBoundsError,
    Vertex,
)
from services.profile import Profile, shatter

from .subbox_index import SubboxIndex, build_subbox_index, unique_codes

logger = logging.getLogger(__name__)

UNDETERMINED = -1
DISCIPLINES = ("fifo", "lifo", "random")

PivotObserver = Callable[[Vertex, Pattern], None]


class FailureReason(str, Enum):
    CORNER_NOT_FOUND = "corner-not-found"
    STALLED = "stalled"
    CONFLICT = "conflict"


class AssemblyError(LatticeError):
    """Сборка прервана; reason — одна из FailureReason"""

    def __init__(self, reason: FailureReason, message: str, partial=None):
        super().__init__(message)
        self.reason = reason
        self.partial = partial


# ============================================================================
# WORKING STATE
# ============================================================================

class PartialLabeling:
    """
    Частичная разметка: коды 0..q-1, UNDETERMINED для неизвестных

    Определённая ячейка никогда не перезаписывается другим значением.
    """

    def __init__(self, config: LatticeConfig):
        self.config = config
        self.labels = np.full(config.shape, UNDETERMINED, dtype=np.int16)
        # углы (r-1)-боксов, уже обработанные шагом 2
        self.explored = np.zeros((config.n - config.r + 2,) * config.d, dtype=bool)
        self.pivots = 0
        self.step3_filled = 0

    @property
    def determined(self) -> np.ndarray:
        return self.labels >= 0

    @property
    def determined_count(self) -> int:
        return int(np.count_nonzero(self.labels >= 0))

    @property
    def is_complete(self) -> bool:
        return bool((self.labels >= 0).all())

    def values(self) -> np.ndarray:
        """1-based метки, 0 для неопределённых"""
        return np.where(self.labels >= 0, self.labels + 1, 0)

    def write(self, corner: Sequence[int], block: np.ndarray) -> int:
        """
        Записать блок с углом corner (ячейки блока < 0 пропускаются)

        Returns:
            Количество впервые определённых ячеек

        Raises:
            AssemblyError(CONFLICT): определённая ячейка получила бы другое значение
        """
        block = np.asarray(block, dtype=np.int16)
        corner = tuple(int(c) for c in corner)
        if any(c < 0 for c in corner) or any(
                c + s > self.config.n for c, s in zip(corner, block.shape)
        ):
            raise RegionOutOfBoundsError(f"Блок {block.shape} с углом {corner} вне Λ_n")

        slices = tuple(slice(c, c + s) for c, s in zip(corner, block.shape))
        current = self.labels[slices]
        incoming = block >= 0
        known = current >= 0

        clash = incoming & known & (current != block)
        if clash.any():
            local = tuple(int(x) for x in np.argwhere(clash)[0])
            vertex = tuple(c + x for c, x in zip(corner, local))
            raise AssemblyError(
                FailureReason.CONFLICT,
                f"Конфликт в вершине {vertex}: {int(current[local]) + 1} != {int(block[local]) + 1}",
                partial=self,
            )

        fresh = incoming & ~known
        current[fresh] = block[fresh]
        return int(np.count_nonzero(fresh))

    def copy(self) -> "PartialLabeling":
        other = PartialLabeling(self.config)
        other.labels = self.labels.copy()
        other.explored = self.explored.copy()
        other.pivots = self.pivots
        other.step3_filled = self.step3_filled
        return other

    def to_labeling(self) -> Labeling:
        if not self.is_complete:
            raise AssemblyError(
                FailureReason.STALLED,
                f"Определено {self.determined_count}/{self.config.vertex_count} вершин",
                partial=self,
            )
        return Labeling(self.config, self.labels.astype(np.uint8))


@dataclass
class AssemblyReport:
    success: bool
    determined_after_step: Tuple[int, int, int]
    step2_explored_boxes: int
    step3_filled: int
    failure_reason: Optional[FailureReason] = None

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "determined_after_step": list(self.determined_after_step),
            "step2_explored_boxes": self.step2_explored_boxes,
            "step3_filled": self.step3_filled,
            "failure_reason": self.failure_reason.value if self.failure_reason else None,
        }


# ============================================================================
# HELPERS
# ============================================================================

def _full_corners(
        labels: np.ndarray,
        side: int,
        lo: Sequence[int],
        hi: Sequence[int],
        bounds: BoxRegion
) -> List[Vertex]:
    """
    Углы полностью определённых s-боксов внутри bounds, задевающих [lo, hi]

    Returns:
        Углы в row-major порядке
    """
    d = labels.ndim
    clo = [max(l - side + 1, b) for l, b in zip(lo, bounds.corner)]
    chi = [min(h, e - side + 1) for h, e in zip(hi, bounds.end)]
    if any(a > b for a, b in zip(clo, chi)):
        return []

    sub = labels[tuple(slice(a, b + side) for a, b in zip(clo, chi))] >= 0
    full = sliding_window_view(sub, (side,) * d).all(axis=tuple(range(d, 2 * d)))
    return [
        tuple(int(x) + a for x, a in zip(idx, clo))
        for idx in np.argwhere(full)
    ]


def _pop(queue, discipline: str, rng: Optional[np.random.Generator]):
    if discipline == "fifo":
        return queue.popleft()
    if discipline == "lifo":
        return queue.pop()
    pick = int(rng.integers(len(queue)))
    queue[pick], queue[-1] = queue[-1], queue[pick]
    return queue.pop()


def _sub_codes(index: SubboxIndex, key: bytes) -> np.ndarray:
    raw = np.frombuffer(key, dtype=np.uint8, offset=len(index.sub_header))
    return raw.reshape((index.r - 1,) * index.d)


# ============================================================================
# STEP OPERATIONS
# ============================================================================

def extend_from_unique(
        partial: PartialLabeling,
        A: BoxRegion,
        profile: Profile,
        index: SubboxIndex,
        within: Optional[BoxRegion] = None
) -> int:
    """
    Дописать шарды, содержащие σ|_A, вокруг (r-1)-бокса A

    Размещение на смещении e записывается, только если (r-1)-паттерн
    встречается на этом смещении ровно один раз и r-бокс A - e лежит
    внутри Λ_n (и внутри within, если задан). Такой шард вынужден.

    Args:
        partial: Рабочее состояние (изменяется на месте)
        A: (r-1)-бокс, полностью определённый
        profile: Профиль (для сверки конфигурации)
        index: Индекс подбоксов профиля
        within: Ограничивающий регион для размещений

    Returns:
        Количество впервые определённых вершин
    """
    config = partial.config
    if profile.config != config:
        raise PatternShapeError("Профиль и частичная разметка из разных конфигураций")
    if A.sides != (config.r - 1,) * config.d:
        raise PatternShapeError(f"A должен быть (r-1)-боксом, получено {A.sides}")
    if not A.is_within(config):
        raise RegionOutOfBoundsError(f"{A} вне Λ_{config.n}")

    codes = partial.labels[A.slices()]
    if (codes < 0).any():
        raise PatternShapeError(f"{A} определён не полностью")

    key = index.key_of(codes)
    found = index.entries.get(key)
    if found is None:
        return 0

    totals = index.totals[key]
    written = 0
    for e_idx, offset in enumerate(index.offsets):
        if totals[e_idx] != 1:
            continue
        box = BoxRegion.cube(tuple(a - o for a, o in zip(A.corner, offset)), config.r)
        if not box.is_within(config):
            continue
        if within is not None and not within.contains(box):
            continue
        img_idx, _ = found[e_idx][0]
        written += partial.write(box.corner, index.images[img_idx])

    return written


def _percolate(
        partial: PartialLabeling,
        index: SubboxIndex,
        explored: np.ndarray,
        within: BoxRegion,
        profile: Profile,
        discipline: str = "fifo",
        rng: Optional[np.random.Generator] = None,
        on_pivot: Optional[PivotObserver] = None
) -> int:
    """Worklist по полностью определённым неисследованным (r-1)-боксам"""
    if discipline not in DISCIPLINES:
        raise ValueError(f"Неизвестная дисциплина очереди: {discipline}")
    if discipline == "random" and rng is None:
        rng = np.random.default_rng(0)

    config = partial.config
    side = config.r - 1
    queue = deque() if discipline == "fifo" else []
    seen = explored.copy()

    def push_region(lo, hi):
        for corner in _full_corners(partial.labels, side, lo, hi, within):
            if not seen[corner]:
                seen[corner] = True
                queue.append(corner)

    push_region(within.corner, within.end)

    processed = 0
    while queue:
        corner = _pop(queue, discipline, rng)
        explored[corner] = True
        processed += 1

        A = BoxRegion.cube(corner, side)
        codes = partial.labels[A.slices()]
        if not unique_codes(codes, index):
            continue

        partial.pivots += 1
        if on_pivot is not None:
            on_pivot(corner, Pattern(codes.astype(np.uint8)))

        if extend_from_unique(partial, A, profile, index, within=within):
            lo = tuple(c - 1 for c in corner)
            hi = tuple(c + config.r - 1 for c in corner)
            push_region(lo, hi)

    return processed


def grow_corner(
        partial: PartialLabeling,
        profile: Profile,
        index: SubboxIndex,
        on_pivot: Optional[PivotObserver] = None
) -> PartialLabeling:
    """
    Рост определённого угла до Λ_{2r}

    Перколяция и достройка шага 3 чередуются, обе ограничены Λ_{2r}.
    При n <= 2r это вся решётка.
    """
    config = partial.config
    region = BoxRegion.cube((0,) * config.d, min(2 * config.r, config.n))
    local_explored = np.zeros_like(partial.explored)

    while True:
        _percolate(partial, index, local_explored, region, profile, on_pivot=on_pivot)
        if (partial.labels[region.slices()] >= 0).all():
            return partial

        before = partial.determined_count
        step3_finish(partial, profile, index, within=region)
        if partial.determined_count == before:
            break

    raise AssemblyError(
        FailureReason.STALLED,
        f"Λ_{region.sides[0]} определён не полностью "
        f"({partial.determined_count} вершин)",
        partial=partial,
    )


def corner_candidates(index: SubboxIndex) -> List[bytes]:
    """(r-1)-паттерны, встречающиеся на нулевом смещении и ни на каком другом"""
    return [
        key for key, counts in index.totals.items()
        if counts[0] >= 1 and not counts[1:].any()
    ]


def step1_corner(
        profile: Profile,
        index: SubboxIndex,
        on_pivot: Optional[PivotObserver] = None
) -> PartialLabeling:
    """
    Шаг 1: определить Λ_{2r}

    Raises:
        AssemblyError(CORNER_NOT_FOUND): 0 или >= 2 кандидатов угла
        AssemblyError(STALLED): рост до Λ_{2r} остановился
    """
    candidates = corner_candidates(index)
    if len(candidates) != 1:
        raise AssemblyError(
            FailureReason.CORNER_NOT_FOUND,
            f"Кандидатов угла: {len(candidates)} (нужен ровно один)",
        )

    partial = PartialLabeling(profile.config)
    partial.write((0,) * profile.config.d, _sub_codes(index, candidates[0]))
    logger.debug("Шаг 1: угол найден, рост до Λ_2r")
    return grow_corner(partial, profile, index, on_pivot=on_pivot)


def step2_percolate(
        partial: PartialLabeling,
        profile: Profile,
        index: SubboxIndex,
        discipline: str = "fifo",
        rng: Optional[np.random.Generator] = None,
        on_pivot: Optional[PivotObserver] = None
) -> PartialLabeling:
    """
    Шаг 2: перколяция уникальных (r-1)-боксов по всей решётке

    Итоговое множество определённых вершин не зависит от дисциплины очереди.

    Args:
        discipline: "fifo", "lifo" или "random"
        rng: Генератор для "random"
        on_pivot: Наблюдатель, вызывается для каждого уникального опорного бокса
    """
    whole = BoxRegion.cube((0,) * partial.config.d, partial.config.n)
    processed = _percolate(
        partial, index, partial.explored, whole, profile,
        discipline=discipline, rng=rng, on_pivot=on_pivot,
    )
    logger.debug(
        f"Шаг 2: обработано {processed} боксов, "
        f"определено {partial.determined_count}/{partial.config.vertex_count}"
    )
    return partial


def step3_finish(
        partial: PartialLabeling,
        profile: Profile,
        index: Optional[SubboxIndex] = None,
        within: Optional[BoxRegion] = None
) -> PartialLabeling:
    """
    Шаг 3: достройка по частично определённым r-боксам

    Для r-бокса B с определённым подмножеством 𝖡 перебираются все образы
    шардов, совпадающие с σ|_𝖡; ячейка B записывается, если все такие образы
    дают в ней одно и то же значение. Повторяется до неподвижной точки.

    Args:
        within: Рассматривать только r-боксы внутри этого региона
    """
    if index is None:
        index = build_subbox_index(profile)

    config = partial.config
    r, d = config.r, config.d
    images = index.images.reshape(index.images.shape[0], -1).astype(np.int16)
    axes = tuple(range(d, 2 * d))

    total = 0
    while True:
        determined = partial.labels >= 0
        if determined.all():
            break

        windows = sliding_window_view(determined, (r,) * d)
        candidates = np.argwhere(windows.any(axis=axes) & ~windows.all(axis=axes))

        filled = 0
        for c in candidates:
            corner = tuple(int(x) for x in c)
            if within is not None and not within.contains(BoxRegion.cube(corner, r)):
                continue
            slices = tuple(slice(x, x + r) for x in corner)
            block = partial.labels[slices].reshape(-1)
            known = block >= 0
            if known.all() or not known.any():
                continue

            match = (images[:, known] == block[known]).all(axis=1)
            if not match.any():
                continue

            completions = images[match]
            agreed = (completions == completions[0]).all(axis=0) & ~known
            if not agreed.any():
                continue

            out = np.full(block.shape, UNDETERMINED, dtype=np.int16)
            out[agreed] = completions[0][agreed]
            filled += partial.write(corner, out.reshape((r,) * d))

        if filled == 0:
            break
        total += filled

    partial.step3_filled += total
    logger.debug(f"Шаг 3: дозаполнено {total} вершин")
    return partial


# ============================================================================
# DRIVER
# ============================================================================

Step1 = Callable[..., PartialLabeling]


def run_assembly(
        profile: Profile,
        index: SubboxIndex,
        step1: Step1,
        reshatter: Callable[[Labeling], Profile],
        discipline: str = "fifo",
        rng: Optional[np.random.Generator] = None,
        on_pivot: Optional[PivotObserver] = None
) -> Tuple[Optional[Labeling], AssemblyReport]:
    """Общий прогон шагов 1 -> 2 -> (3 <-> 2) для oriented и symmetric режимов"""
    config = profile.config

    if config.n == config.r:
        codes, _ = profile.shard_array()
        total = config.vertex_count
        return Labeling(config, codes[0]), AssemblyReport(True, (total, total, total), 0, 0)

    checkpoints: List[int] = []
    partial: Optional[PartialLabeling] = None

    try:
        partial = step1(profile, index, on_pivot=on_pivot)
        checkpoints.append(partial.determined_count)

        step2_percolate(partial, profile, index, discipline, rng, on_pivot)
        checkpoints.append(partial.determined_count)

        while not partial.is_complete:
            before = partial.determined_count
            step3_finish(partial, profile, index)
            if partial.determined_count == before:
                break
            step2_percolate(partial, profile, index, discipline, rng, on_pivot)

        checkpoints.append(partial.determined_count)

    except AssemblyError as e:
        state = e.partial if e.partial is not None else partial
        current = state.determined_count if state is not None else 0
        checkpoints += [current] * (3 - len(checkpoints))
        logger.debug(f"Сборка не удалась ({e.reason.value}): {e}")
        return None, AssemblyReport(
            success=False,
            determined_after_step=tuple(checkpoints),
            step2_explored_boxes=int(state.explored.sum()) if state is not None else 0,
            step3_filled=state.step3_filled if state is not None else 0,
            failure_reason=e.reason,
        )

    explored = int(partial.explored.sum())
    if not partial.is_complete:
        return None, AssemblyReport(
            False, tuple(checkpoints), explored, partial.step3_filled, FailureReason.STALLED
        )

    labeling = partial.to_labeling()
    if reshatter(labeling) != profile:
        logger.error("❌ Собранная разметка не воспроизводит профиль")
        return None, AssemblyReport(
            False, tuple(checkpoints), explored, partial.step3_filled, FailureReason.CONFLICT
        )

    return labeling, AssemblyReport(True, tuple(checkpoints), explored, partial.step3_filled)


def assemble(
        profile: Profile,
        discipline: str = "fifo",
        rng: Optional[np.random.Generator] = None,
        on_pivot: Optional[PivotObserver] = None
) -> Tuple[Optional[Labeling], AssemblyReport]:
    """
    Собрать разметку по oriented профилю

    Returns:
        (Labeling или None, AssemblyReport)
    """
    if profile.symmetric:
        raise PatternShapeError("Symmetric профиль: используйте assemble_symmetric")

    index = build_subbox_index(profile)
    labeling, report = run_assembly(
        profile, index, step1_corner, shatter,
        discipline=discipline, rng=rng, on_pivot=on_pivot,
    )
    logger.debug(f"assemble: {report.to_dict()}")
    return labeling, report

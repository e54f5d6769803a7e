"""
Openness Diagnostics
Статистика открытых 2r-боксов по истинной разметке (только диагностика,
ассемблер её не использует)

2r-бокс открыт, если каждый (r-1)-подбокс внутри него уникален среди всех
(r-1)-боксов Λ_n. Семейство 𝓑_{2r}: углы по каждой оси в точках j*r,
прижатые внутрь у границы (min(j*r, n - 2r)).
"""

import functools
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from services.lattice import Labeling, LatticeConfig

from .union_find import ArrayUnionFind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OpennessStats:
    open_fraction: float
    closed_component_count: int
    max_closed_component_diameter: int
    corner_cluster_fraction: float
    box_count: int

    def to_dict(self) -> dict:
        return {
            "open_fraction": self.open_fraction,
            "closed_component_count": self.closed_component_count,
            "max_closed_component_diameter": self.max_closed_component_diameter,
            "corner_cluster_fraction": self.corner_cluster_fraction,
            "box_count": self.box_count,
        }


def box_family_side(config: LatticeConfig) -> int:
    return min(2 * config.r, config.n)


def box_family_positions(config: LatticeConfig) -> List[int]:
    """Координаты углов 𝓑_{2r} вдоль одной оси"""
    side = box_family_side(config)
    limit = config.n - side
    positions = set()
    j = 0
    while True:
        positions.add(min(j * config.r, limit))
        if j * config.r >= limit:
            break
        j += 1
    return sorted(positions)


def box_family(config: LatticeConfig) -> List[Tuple[int, ...]]:
    """Углы всех боксов 𝓑_{2r} в row-major порядке"""
    return list(itertools.product(box_family_positions(config), repeat=config.d))


def unique_subbox_grid(labeling: Labeling) -> np.ndarray:
    """
    Истинная уникальность (r-1)-боксов

    Returns:
        bool массив формы (n-r+2)^d: True если паттерн бокса с этим углом
        встречается в Λ_n ровно один раз
    """
    config = labeling.config
    side = config.r - 1
    rows = labeling.windows(side)
    _, inverse, counts = np.unique(rows, axis=0, return_inverse=True, return_counts=True)
    unique = counts[np.ravel(inverse)] == 1
    return unique.reshape((config.n - side + 1,) * config.d)


def _union_adjacent(
        uf: ArrayUnionFind,
        mask: np.ndarray,
        positions: np.ndarray,
        limit: int,
        accept: Callable[[List[np.ndarray]], np.ndarray]
):
    """
    Объединить смежные боксы семейства, отмеченные в mask

    Боксы адресуются индексной сеткой m^d. Перебираются только смещения
    индексов, при которых по каждой оси |Δ угла| <= limit.

    Args:
        uf: Union-Find над m^d индексами (row-major)
        mask: bool (m,)*d, какие боксы участвуют
        positions: Координаты углов вдоль оси
        limit: Наибольшее |Δ| по оси, при котором accept может быть истинным
        accept: По |Δ| осей (broadcast-массивы) -> bool смежности
    """
    d = mask.ndim
    m = len(positions)
    steps = np.arange(m)
    radius = int((np.searchsorted(positions, positions + limit, side="right") - 1 - steps).max())
    ids = np.arange(mask.size).reshape(mask.shape)

    for delta in itertools.product(range(-radius, radius + 1), repeat=d):
        # каждая пара один раз
        if delta <= (0,) * d:
            continue
        dest = tuple(slice(max(0, -k), m - max(0, k)) for k in delta)
        src = tuple(slice(max(0, k), m - max(0, -k)) for k in delta)
        gaps = []
        for axis, (s, t) in enumerate(zip(src, dest)):
            shape = [1] * d
            shape[axis] = -1
            gaps.append(np.abs(positions[s] - positions[t]).reshape(shape))
        if any(g.size == 0 for g in gaps):
            continue

        ok = accept(gaps) & mask[dest] & mask[src]
        if ok.any():
            uf.union_pairs(ids[dest][ok], ids[src][ok])


def openness_stats(labeling: Labeling) -> OpennessStats:
    """
    Доля открытых боксов 𝓑_{2r} и слабо связные компоненты закрытых

    Слабая смежность: ℓ∞-расстояние между боксами <= 4r.
    Диаметр компоненты: наибольший размах по осям в вершинах.
    corner_cluster_fraction: доля боксов, связанных с угловым боксом через
    открытые боксы с пересечением >= r^d вершин.
    """
    config = labeling.config
    d, r = config.d, config.r
    side = box_family_side(config)
    inner = side - (r - 1) + 1
    positions = np.asarray(box_family_positions(config), dtype=np.int64)
    picks = np.ix_(*([positions] * d))

    windows = sliding_window_view(unique_subbox_grid(labeling), (inner,) * d)
    is_open = windows[picks].all(axis=tuple(range(d, 2 * d)))
    total = is_open.size
    corners = np.array(box_family(config), dtype=np.int64).reshape(total, d)

    def weak(gaps):
        return functools.reduce(np.logical_and, [g <= 4 * r + side - 1 for g in gaps])

    def strong(gaps):
        volume = functools.reduce(np.multiply, [np.maximum(side - g, 0) for g in gaps])
        return volume >= r ** d

    closed = ArrayUnionFind(total)
    _union_adjacent(closed, ~is_open, positions, 4 * r + side - 1, weak)
    components = closed.groups(np.flatnonzero(~is_open.ravel()))

    max_diameter = 0
    for group in components:
        member = corners[group]
        extent = member.max(axis=0) + side - member.min(axis=0)
        max_diameter = max(max_diameter, int(extent.max()))

    cluster = 0.0
    if is_open.flat[0]:
        net = ArrayUnionFind(total)
        _union_adjacent(net, is_open, positions, side - 1, strong)
        roots = net.roots()[is_open.ravel()]
        cluster = int(np.count_nonzero(roots == 0)) / total

    stats = OpennessStats(
        open_fraction=float(is_open.sum()) / total,
        closed_component_count=len(components),
        max_closed_component_diameter=max_diameter,
        corner_cluster_fraction=cluster,
        box_count=total,
    )
    logger.debug(f"openness: {stats.to_dict()}")
    return stats

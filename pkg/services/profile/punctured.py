"""
Punctured Profiles
Проколотые профили 𝓛(U): для каждой относительной позиции o_j (row-major
по {0..r-1}^d) распределение паттернов r-бокса с углом u - o_j, у которого
ячейка самой вершины u удалена (замаскирована).

Если 𝓛(V1) = 𝓛(V2) для V1 с меткой 1 и V2 с меткой 2, обмен меток
1 <-> 2 на V1 ∪ V2 не меняет мультимножество шардов.
"""

import hashlib
import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from services.lattice import Labeling, LatticeConfig, LatticeError, Vertex
from services.lattice.codec import encode_cells

logger = logging.getLogger(__name__)


class PuncturedDomainError(LatticeError, ValueError):
    """Вершина вне Λ'_n = {u : r <= u_i <= n - r}"""
    pass


def puncture_offsets(config: LatticeConfig) -> List[Vertex]:
    """Относительные позиции o_j, row-major по {0..r-1}^d"""
    return list(itertools.product(range(config.r), repeat=config.d))


def in_inner_domain(config: LatticeConfig, vertex: Sequence[int]) -> bool:
    return len(vertex) == config.d and all(
        config.r <= x <= config.n - config.r for x in vertex
    )


@dataclass(frozen=True)
class PuncturedProfile:
    """
    𝓛(U) = (𝓛_1(U), ..., 𝓛_{r^d}(U))

    components[j] — отсортированный по ключу tuple пар (encoded pattern, count).
    Равенство точное, покомпонентно.
    """

    config: LatticeConfig
    components: Tuple[Tuple[Tuple[bytes, int], ...], ...]

    @property
    def size(self) -> int:
        """|U| (все компоненты имеют одинаковую сумму)"""
        if not self.components:
            return 0
        return sum(count for _, count in self.components[0])

    def component(self, j: int) -> Dict[bytes, int]:
        return dict(self.components[j])

    def digest(self) -> bytes:
        """Каноничный хеш отсортированных компонент"""
        h = hashlib.blake2b(digest_size=16)
        for j, comp in enumerate(self.components):
            h.update(j.to_bytes(4, "little"))
            for key, count in comp:
                h.update(len(key).to_bytes(2, "little"))
                h.update(key)
                h.update(count.to_bytes(4, "little"))
        return h.digest()


def punctured_keys(labeling: Labeling, vertex: Sequence[int]) -> Tuple[bytes, ...]:
    """
    Ключи проколотых паттернов вокруг одной вершины, по одному на o_j

    Raises:
        PuncturedDomainError: вершина вне Λ'_n
    """
    config = labeling.config
    u = tuple(int(x) for x in vertex)
    if not in_inner_domain(config, u):
        raise PuncturedDomainError(
            f"Вершина {u} вне Λ'_n (r={config.r}, n={config.n})"
        )

    codes = labeling.codes
    keys = []
    for offset in puncture_offsets(config):
        corner = tuple(x - o for x, o in zip(u, offset))
        window = codes[tuple(slice(c, c + config.r) for c in corner)]
        mask = np.ones(config.box_shape, dtype=bool)
        mask[offset] = False
        keys.append(encode_cells(window, mask))
    return tuple(keys)


def combine_keys(
        config: LatticeConfig,
        per_vertex: Iterable[Tuple[bytes, ...]]
) -> PuncturedProfile:
    """Собрать 𝓛(U) из ключей отдельных вершин"""
    width = config.r ** config.d
    counters = [Counter() for _ in range(width)]
    for keys in per_vertex:
        for j, key in enumerate(keys):
            counters[j][key] += 1
    components = tuple(tuple(sorted(c.items())) for c in counters)
    return PuncturedProfile(config, components)


def punctured_profile(labeling: Labeling, U: Iterable[Sequence[int]]) -> PuncturedProfile:
    """
    Посчитать 𝓛(U)

    Args:
        labeling: Разметка σ
        U: Вершины из Λ'_n

    Returns:
        PuncturedProfile с r^d компонентами, каждая с суммой |U|
    """
    vertices = [tuple(int(x) for x in u) for u in U]
    return combine_keys(labeling.config, (punctured_keys(labeling, u) for u in vertices))


def grid_points(labeling: Labeling, k: int) -> List[Vertex]:
    """
    U_k = (2r)Z^d ∩ {v ∈ Λ'_n : σ_v = k}

    Returns:
        Отсортированный список вершин; попарное ℓ∞-расстояние >= 2r
    """
    config = labeling.config
    if not 1 <= k <= config.q:
        raise PuncturedDomainError(f"Метка k={k} вне [1, {config.q}]")

    step = 2 * config.r
    axis = [x for x in range(0, config.n, step) if config.r <= x <= config.n - config.r]
    if not axis:
        return []

    code = k - 1
    codes = labeling.codes
    return [
        v for v in itertools.product(axis, repeat=config.d)
        if codes[v] == code
    ]

"""
Label Swap (d >= 2)
Поиск множеств V'_1 ⊆ U_1, V'_2 ⊆ U_2 с 𝓛(V'_1) = 𝓛(V'_2);
обмен меток 1 <-> 2 на V'_1 ∪ V'_2 сохраняет профиль.

Стратегии:
- singleton: точное совпадение проколотых окрестностей двух вершин
- multiset: точные проходы для размеров 1 и 2, затем рандомизированный
  поиск коллизий канонических хешей для размеров 3..max_size
"""

import hashlib
import itertools
import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import SPOIL_BUDGET, SPOIL_MAX_SIZE, SPOIL_SEED
from services.lattice import (
    Labeling,
    LatticeError,
    Vertex,
    check_vertex,
    make_rng,
)
from services.profile import grid_points, punctured_keys, punctured_profile

from .certificates import SwapCertificateND, verify_nonidentifiable

logger = logging.getLogger(__name__)

Verifier = Callable[[Labeling, Labeling], bool]
Keys = Tuple[bytes, ...]


class SwapPreconditionError(LatticeError, ValueError):
    """σ != 1 на V'_1, σ != 2 на V'_2 или множества пересекаются"""
    pass


class SearchMetrics:
    """Метрики поиска сертификата"""

    def __init__(self):
        self.candidates_evaluated = 0
        self.hash_hits = 0
        self.confirmed = 0
        self.rejected = 0
        self.budget_exhausted = False

    def candidate(self, count: int = 1):
        self.candidates_evaluated += count

    def hash_hit(self):
        self.hash_hits += 1

    def hit_confirmed(self):
        self.confirmed += 1

    def hit_rejected(self):
        self.rejected += 1

    def get_stats(self) -> Dict:
        return {
            'candidates_evaluated': self.candidates_evaluated,
            'hash_hits': self.hash_hits,
            'confirmed': self.confirmed,
            'rejected': self.rejected,
            'budget_exhausted': self.budget_exhausted,
        }


def apply_swap(
        labeling: Labeling,
        V1: Iterable[Sequence[int]],
        V2: Iterable[Sequence[int]]
) -> Labeling:
    """
    Обменять метки 1 <-> 2 на V1 ∪ V2

    Raises:
        SwapPreconditionError: σ != 1 на V1 или σ != 2 на V2
    """
    config = labeling.config
    ones = [check_vertex(config, v) for v in V1]
    twos = [check_vertex(config, v) for v in V2]

    if set(ones) & set(twos):
        raise SwapPreconditionError("V1 и V2 пересекаются")

    codes = labeling.codes.copy()
    for v in ones:
        if codes[v] != 0:
            raise SwapPreconditionError(f"σ{v} = {int(codes[v]) + 1}, ожидалась 1")
    for v in twos:
        if codes[v] != 1:
            raise SwapPreconditionError(f"σ{v} = {int(codes[v]) + 1}, ожидалась 2")

    for v in ones:
        codes[v] = 1
    for v in twos:
        codes[v] = 0
    return Labeling(config, codes)


def signature(keys: Sequence[Keys]) -> bytes:
    """
    Канонический хеш 𝓛(U) по ключам вершин U

    Каждая компонента — отсортированный мультисет ключей; порядок вершин
    в U не влияет на результат.
    """
    h = hashlib.blake2b(digest_size=16)
    width = len(keys[0]) if keys else 0
    for j in range(width):
        h.update(b"|")
        for key in sorted(k[j] for k in keys):
            h.update(len(key).to_bytes(2, "little"))
            h.update(key)
    return h.digest()


def _confirm(
        labeling: Labeling,
        U: Sequence[Vertex],
        W: Sequence[Vertex],
        verify: Verifier,
        metrics: SearchMetrics,
        symmetric: bool
) -> Optional[SwapCertificateND]:
    """Точная проверка 𝓛(U) = 𝓛(W) и профиля после обмена"""
    if punctured_profile(labeling, U) != punctured_profile(labeling, W):
        metrics.hit_rejected()
        return None

    permuted = apply_swap(labeling, U, W)
    if not verify(labeling, permuted):
        metrics.hit_rejected()
        return None

    metrics.hit_confirmed()
    return SwapCertificateND(
        V1=tuple(sorted(U)),
        V2=tuple(sorted(W)),
        original=labeling,
        permuted=permuted,
        symmetric=symmetric,
        stats=metrics.get_stats(),
    )


def _vertex_keys(labeling: Labeling, points: Sequence[Vertex]) -> Dict[Vertex, Keys]:
    return {v: punctured_keys(labeling, v) for v in points}


def find_singleton_swap(
        labeling: Labeling,
        verify: Verifier = verify_nonidentifiable,
        metrics: Optional[SearchMetrics] = None,
        symmetric: bool = False
) -> Optional[SwapCertificateND]:
    """
    Поиск |V'_1| = |V'_2| = 1

    Точки U_1 сканируются в row-major порядке; для каждой берётся первая
    точка U_2 с той же проколотой окрестностью.

    Returns:
        Проверенный сертификат или None
    """
    metrics = metrics or SearchMetrics()
    ones = grid_points(labeling, 1)
    twos = grid_points(labeling, 2)
    if not ones or not twos:
        return None

    by_key: Dict[Keys, List[Vertex]] = {}
    for w in twos:
        by_key.setdefault(punctured_keys(labeling, w), []).append(w)

    for u in ones:
        metrics.candidate()
        for w in by_key.get(punctured_keys(labeling, u), ()):
            metrics.hash_hit()
            cert = _confirm(labeling, [u], [w], verify, metrics, symmetric)
            if cert is not None:
                return cert

    return None


def _pair_pass(
        labeling: Labeling,
        ones: Sequence[Vertex],
        twos: Sequence[Vertex],
        keys: Dict[Vertex, Keys],
        budget: int,
        verify: Verifier,
        metrics: SearchMetrics,
        symmetric: bool
) -> Optional[SwapCertificateND]:
    """Точный проход для |V'| = 2"""
    table: Dict[bytes, List[Tuple[Vertex, Vertex]]] = {}
    for pair in itertools.combinations(ones, 2):
        if metrics.candidates_evaluated >= budget:
            return None
        metrics.candidate()
        table.setdefault(signature([keys[v] for v in pair]), []).append(pair)

    for pair in itertools.combinations(twos, 2):
        if metrics.candidates_evaluated >= budget:
            return None
        metrics.candidate()
        for match in table.get(signature([keys[v] for v in pair]), ()):
            metrics.hash_hit()
            cert = _confirm(labeling, match, pair, verify, metrics, symmetric)
            if cert is not None:
                return cert
    return None


def find_multiset_swap(
        labeling: Labeling,
        max_size: int = SPOIL_MAX_SIZE,
        budget: int = SPOIL_BUDGET,
        seed: int = SPOIL_SEED,
        verify: Verifier = verify_nonidentifiable,
        metrics: Optional[SearchMetrics] = None,
        symmetric: bool = False
) -> Optional[SwapCertificateND]:
    """
    Поиск V'_1, V'_2 размера <= max_size

    Args:
        labeling: Разметка σ
        max_size: Максимальный |V'_1| = |V'_2|
        budget: Лимит оценённых кандидатов
        seed: Seed рандомизированной фазы
        verify: Проверка (original, permuted)
        metrics: Счётчики поиска

    Returns:
        Проверенный сертификат или None
    """
    if max_size < 1:
        raise ValueError(f"max_size должен быть >= 1, получено {max_size}")
    metrics = metrics or SearchMetrics()

    cert = find_singleton_swap(labeling, verify, metrics, symmetric)
    if cert is not None or max_size == 1:
        return cert

    ones = grid_points(labeling, 1)
    twos = grid_points(labeling, 2)
    if len(ones) < 2 or len(twos) < 2:
        return None

    keys = _vertex_keys(labeling, ones)
    keys.update(_vertex_keys(labeling, twos))

    cert = _pair_pass(labeling, ones, twos, keys, budget, verify, metrics, symmetric)
    if cert is not None:
        return cert

    top = min(max_size, len(ones), len(twos))
    if top < 3:
        metrics.budget_exhausted = metrics.candidates_evaluated >= budget
        return None

    c = labeling.config
    rng = make_rng(seed, c.d, c.n, c.q, c.r)
    seen_ones: Dict[bytes, Tuple[Vertex, ...]] = {}
    seen_twos: Dict[bytes, Tuple[Vertex, ...]] = {}
    ones_arr = np.arange(len(ones))
    twos_arr = np.arange(len(twos))

    while metrics.candidates_evaluated < budget:
        size = int(rng.integers(3, top + 1))
        U = tuple(ones[i] for i in sorted(rng.choice(ones_arr, size, replace=False)))
        W = tuple(twos[i] for i in sorted(rng.choice(twos_arr, size, replace=False)))
        metrics.candidate(2)

        sig_u = signature([keys[v] for v in U])
        sig_w = signature([keys[v] for v in W])
        seen_ones.setdefault(sig_u, U)
        seen_twos.setdefault(sig_w, W)

        for sig, left, right in (
                (sig_u, U, seen_twos.get(sig_u)),
                (sig_w, seen_ones.get(sig_w), W),
        ):
            if left is None or right is None:
                continue
            metrics.hash_hit()
            cert = _confirm(labeling, left, right, verify, metrics, symmetric)
            if cert is not None:
                return cert

    metrics.budget_exhausted = True
    logger.debug(f"find_multiset_swap: бюджет исчерпан {metrics.get_stats()}")
    return None

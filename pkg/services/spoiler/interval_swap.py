"""
Interval Swap (d = 1)
Λ_n делится на последовательные интервалы I_1..I_k по m = ⌊n/k⌋ вершин;
в каждом I_j берутся Γ_j = ⌊m/r⌋ непересекающихся r-интервалов, прижатых
влево. Если σ|_{B1} = σ|_{B4} и σ|_{B3} = σ|_{B6}, то обмен
J = [B1 + r, B3) и J' = [B4 + r, B6) сохраняет профиль.
"""

import logging
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from services.lattice import BoxRegion, InvalidConfigError, Labeling

from .certificates import SwapCertificate1D, splice_intervals, verify_nonidentifiable

logger = logging.getLogger(__name__)

Verifier = Callable[[Labeling, Labeling], bool]

# роли (B1, B3, B4, B6) среди интервалов I_1..I_6
ORIENTED_ROLES = (0, 2, 3, 5)


def packed_starts(interval_start: int, m: int, r: int) -> List[int]:
    """Начала ⌊m/r⌋ r-интервалов, прижатых к началу I_j"""
    return [interval_start + k * r for k in range(m // r)]


def _matching_pairs(
        codes: np.ndarray,
        left: Sequence[int],
        right: Sequence[int],
        r: int
) -> Iterator[Tuple[int, int]]:
    """Пары (b, b') с σ|_[b, b+r) = σ|_[b', b'+r), в порядке сканирования"""
    by_pattern: Dict[bytes, List[int]] = {}
    for b in right:
        by_pattern.setdefault(codes[b:b + r].tobytes(), []).append(b)
    for b in left:
        for b_prime in by_pattern.get(codes[b:b + r].tobytes(), ()):
            yield b, b_prime


def find_interval_swap(
        labeling: Labeling,
        parts: int,
        roles: Tuple[int, int, int, int],
        verify: Verifier,
        symmetric: bool = False
) -> Optional[SwapCertificate1D]:
    """
    Общий поиск обмена интервалов

    Args:
        labeling: Разметка (d = 1)
        parts: На сколько интервалов делить Λ_n
        roles: Номера интервалов (0-based) для B1, B3, B4, B6
        verify: Проверка (original, permuted) перед возвратом
        symmetric: Пометка сертификата

    Returns:
        Проверенный сертификат или None
    """
    config = labeling.config
    if config.d != 1:
        raise InvalidConfigError(f"Обмен интервалов только для d=1, получено d={config.d}")
    n, r = config.n, config.r
    if n < parts * r:
        raise InvalidConfigError(f"Нужно n >= {parts}r, получено n={n}, r={r}")

    m = n // parts
    codes = labeling.codes
    gammas = [packed_starts(j * m, m, r) for j in range(parts)]
    g1, g3, g4, g6 = (gammas[j] for j in roles)

    pairs36 = list(_matching_pairs(codes, g3, g6, r))
    if not pairs36:
        logger.debug("spoil_1d: нет совпадающих пар (B3, B6)")
        return None

    for b1, b4 in _matching_pairs(codes, g1, g4, r):
        J_start = b1 + r
        J_prime_start = b4 + r

        for b3, b6 in pairs36:
            J = (J_start, b3)
            J_prime = (J_prime_start, b6)
            if J[1] - J[0] < m or J_prime[1] - J_prime[0] < m:
                continue
            if np.array_equal(codes[J[0]:J[0] + m], codes[J_prime[0]:J_prime[0] + m]):
                # σ|_{J[1,m]} = σ|_{J'[1,m]}: от b3, b6 не зависит
                break

            permuted = Labeling(config, splice_intervals(codes, J, J_prime))
            if not verify(labeling, permuted):
                continue

            logger.debug(f"spoil_1d: B1={b1} B3={b3} B4={b4} B6={b6}")
            return SwapCertificate1D(
                B1=BoxRegion((b1,), (r,)),
                B3=BoxRegion((b3,), (r,)),
                B4=BoxRegion((b4,), (r,)),
                B6=BoxRegion((b6,), (r,)),
                J=J,
                J_prime=J_prime,
                original=labeling,
                permuted=permuted,
                symmetric=symmetric,
            )

    return None


def spoil_1d(labeling: Labeling) -> Optional[SwapCertificate1D]:
    """
    Сертификат неидентифицируемости для d = 1 (шесть интервалов)

    Raises:
        InvalidConfigError: d != 1 или n < 6r
    """
    return find_interval_swap(labeling, 6, ORIENTED_ROLES, verify_nonidentifiable)

"""
Brute-force Oracle
Определение идентифицируемости полным перебором всех q^(n^d) разметок

Разметка с индексом i: базовые q-цифры i, первая ячейка — старшая цифра.
Шард кодируется целым числом (r^d цифр), профиль — отсортированной строкой
кодов шардов; сравнение профилей векторизовано по чанкам.
"""

import logging
from typing import Iterator, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from config.settings import ORACLE_CHUNK_SIZE, ORACLE_ENUMERATION_CAP
from services.lattice import ConfigMismatchError, Labeling, LatticeConfig, LatticeError

logger = logging.getLogger(__name__)

MAX_SHARD_BITS = 62


class InstanceTooLargeError(LatticeError):
    """q^(n^d) превышает лимит перебора"""
    pass


def enumeration_size(config: LatticeConfig) -> int:
    return config.q ** config.vertex_count


def _check_size(config: LatticeConfig, cap: int) -> int:
    total = enumeration_size(config)
    if total > cap:
        raise InstanceTooLargeError(
            f"q^(n^d) = {config.q}^{config.vertex_count} превышает лимит {cap}"
        )
    shard_bits = (config.r ** config.d) * (config.q - 1).bit_length()
    if shard_bits > MAX_SHARD_BITS:
        raise InstanceTooLargeError(f"Шард не помещается в int64 ({shard_bits} бит)")
    return total


def labeling_index(labeling: Labeling) -> int:
    """Индекс разметки в порядке перебора"""
    q = labeling.config.q
    index = 0
    for code in labeling.codes.ravel():
        index = index * q + int(code)
    return index


def decode_indices(config: LatticeConfig, indices: np.ndarray) -> np.ndarray:
    """Индексы -> коды формы (len, n, ..., n)"""
    size = config.vertex_count
    powers = config.q ** np.arange(size - 1, -1, -1, dtype=np.int64)
    digits = (indices[:, None] // powers[None, :]) % config.q
    return digits.astype(np.uint8).reshape((len(indices),) + config.shape)


def profile_rows(config: LatticeConfig, codes: np.ndarray) -> np.ndarray:
    """
    Канонические строки профилей для батча разметок

    Returns:
        int64 массив (batch, (n-r+1)^d): отсортированные коды шардов
    """
    d, r = config.d, config.r
    batch = codes.shape[0]
    windows = sliding_window_view(codes, (r,) * d, axis=tuple(range(1, d + 1)))
    shards = windows.reshape(batch, config.shard_count, r ** d).astype(np.int64)
    weights = config.q ** np.arange(r ** d - 1, -1, -1, dtype=np.int64)
    keys = shards @ weights
    keys.sort(axis=1)
    return keys


def _chunks(total: int, chunk: int) -> Iterator[Tuple[int, int]]:
    for start in range(0, total, chunk):
        yield start, min(start + chunk, total)


def brute_force_identifiable(
        config: LatticeConfig,
        labeling: Labeling,
        cap: int = ORACLE_ENUMERATION_CAP,
        chunk: int = ORACLE_CHUNK_SIZE
) -> bool:
    """
    True iff никакая другая разметка Λ_n не даёт тот же профиль

    Raises:
        InstanceTooLargeError: q^(n^d) > cap
        ConfigMismatchError: labeling из другой конфигурации
    """
    twin = find_profile_twin(config, labeling, cap, chunk)
    if twin is not None:
        logger.debug(f"oracle: найден свидетель {twin.values().ravel().tolist()}")
    return twin is None


def find_profile_twin(
        config: LatticeConfig,
        labeling: Labeling,
        cap: int = ORACLE_ENUMERATION_CAP,
        chunk: int = ORACLE_CHUNK_SIZE
) -> Optional[Labeling]:
    """Первая (по индексу) другая разметка с тем же профилем или None"""
    if labeling.config != config:
        raise ConfigMismatchError("Разметка не соответствует конфигурации")
    total = _check_size(config, cap)
    own = labeling_index(labeling)
    target = profile_rows(config, labeling.codes[None, ...])[0]

    for start, stop in _chunks(total, chunk):
        indices = np.arange(start, stop, dtype=np.int64)
        codes = decode_indices(config, indices)
        same = (profile_rows(config, codes) == target).all(axis=1) & (indices != own)
        if same.any():
            return Labeling(config, codes[np.argmax(same)])
    return None


def identifiable_census(
        config: LatticeConfig,
        cap: int = ORACLE_ENUMERATION_CAP,
        chunk: int = ORACLE_CHUNK_SIZE
) -> np.ndarray:
    """
    Идентифицируемость всех разметок сразу

    Returns:
        bool массив длины q^(n^d): True если класс профиля разметки одноэлементный
    """
    total = _check_size(config, cap)
    rows = np.concatenate([
        profile_rows(config, decode_indices(config, np.arange(start, stop, dtype=np.int64)))
        for start, stop in _chunks(total, chunk)
    ])
    _, inverse, counts = np.unique(rows, axis=0, return_inverse=True, return_counts=True)
    census = counts[np.ravel(inverse)] == 1

    logger.debug(
        f"census d={config.d} n={config.n} q={config.q} r={config.r}: "
        f"{int(census.sum())}/{total} идентифицируемы"
    )
    return census

"""
Empirical Profile
Анонимное мультимножество паттернов всех r-боксов (без информации о положении)
"""

import hashlib
import logging
from types import MappingProxyType
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from services.lattice import (
    ConfigMismatchError,
    InvalidConfigError,
    Labeling,
    LatticeConfig,
    decode_pattern,
)
from services.lattice.codec import pattern_header

logger = logging.getLogger(__name__)


class Profile:
    """
    Мультимножество r-шардов: encoded pattern -> кратность

    symmetric=True означает, что каждый шард приведён к canonical_form
    (наблюдения с точностью до поворотов/отражений).
    """

    __slots__ = ("config", "symmetric", "_counts", "_array", "_fingerprint")

    def __init__(
            self,
            config: LatticeConfig,
            counts: Mapping[bytes, int],
            symmetric: bool = False
    ):
        header = pattern_header(config.box_shape)
        key_len = len(header) + config.r ** config.d

        clean: Dict[bytes, int] = {}
        for key, mult in counts.items():
            key = bytes(key)
            mult = int(mult)
            if mult < 1:
                raise InvalidConfigError(f"Кратность шарда должна быть >= 1, получено {mult}")
            if len(key) != key_len or not key.startswith(header):
                raise InvalidConfigError(
                    f"Ключ не является полным {config.r}-боксом в d={config.d}"
                )
            if max(key[len(header):]) >= config.q:
                raise InvalidConfigError(f"Метка шарда вне [1, {config.q}]")
            clean[key] = mult

        total = sum(clean.values())
        if total != config.shard_count:
            raise InvalidConfigError(
                f"Суммарная кратность {total} != (n-r+1)^d = {config.shard_count}"
            )

        self.config = config
        self.symmetric = bool(symmetric)
        self._counts = dict(sorted(clean.items()))
        self._array: Optional[Tuple[np.ndarray, np.ndarray]] = None
        self._fingerprint: Optional[str] = None

    @property
    def counts(self) -> Mapping[bytes, int]:
        """Только чтение; ключи отсортированы по байтам"""
        return MappingProxyType(self._counts)

    @property
    def distinct(self) -> int:
        return len(self._counts)

    @property
    def total(self) -> int:
        return self.config.shard_count

    def patterns(self):
        """Пары (Pattern, кратность) в порядке ключей"""
        for key, mult in self._counts.items():
            yield decode_pattern(key), mult

    def shard_array(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Шарды как матрица кодов

        Returns:
            (codes формы (K, r, ..., r) uint8, mults формы (K,) int64)
            в порядке ключей
        """
        if self._array is None:
            c = self.config
            offset = 1 + 2 * c.d
            k = len(self._counts)
            flat = np.frombuffer(
                b"".join(key[offset:] for key in self._counts), dtype=np.uint8
            )
            codes = flat.reshape((k,) + c.box_shape).copy()
            mults = np.fromiter(self._counts.values(), dtype=np.int64, count=k)
            codes.flags.writeable = False
            mults.flags.writeable = False
            self._array = (codes, mults)
        return self._array

    def fingerprint(self) -> str:
        """Короткий hex-отпечаток мультимножества (для логов и отчётов)"""
        if self._fingerprint is None:
            h = hashlib.blake2b(digest_size=8)
            h.update(repr(self.config.to_dict()).encode())
            h.update(b"S" if self.symmetric else b"O")
            for key, mult in self._counts.items():
                h.update(key)
                h.update(mult.to_bytes(8, "little"))
            self._fingerprint = h.hexdigest()
        return self._fingerprint

    def __eq__(self, other) -> bool:
        if not isinstance(other, Profile):
            return NotImplemented
        return (
            self.config == other.config
            and self.symmetric == other.symmetric
            and self._counts == other._counts
        )

    def __hash__(self) -> int:
        return hash(self.fingerprint())

    def __repr__(self) -> str:
        mode = "symmetric" if self.symmetric else "oriented"
        return (
            f"Profile({self.config.to_dict()}, {mode}, "
            f"distinct={self.distinct}, total={self.total})"
        )


def count_rows(config: LatticeConfig, rows: np.ndarray) -> Dict[bytes, int]:
    """
    Посчитать мультимножество строк (каждая строка = r^d кодов шарда)

    Возвращает ключи в формате encode_pattern.
    """
    header = pattern_header(config.box_shape)
    if rows.shape[0] == 0:
        return {}
    unique, counts = np.unique(np.ascontiguousarray(rows), axis=0, return_counts=True)
    return {
        header + row.tobytes(): int(mult)
        for row, mult in zip(unique, counts)
    }


def shatter(labeling: Labeling) -> Profile:
    """
    Разбить разметку на r-шарды и забыть их положение

    Args:
        labeling: Полная разметка Λ_n

    Returns:
        Profile: counts[p] = число r-боксов B с σ|_B = p
    """
    config = labeling.config
    rows = labeling.windows(config.r)
    counts = count_rows(config, rows)

    logger.debug(
        f"shatter: {config.shard_count} шардов, {len(counts)} различных "
        f"(d={config.d}, n={config.n}, r={config.r})"
    )
    return Profile(config, counts)


def profiles_equal(a: Profile, b: Profile) -> bool:
    """True если мультимножества совпадают (ключи и кратности)"""
    if a.config != b.config:
        raise ConfigMismatchError(
            f"Разные конфигурации: {a.config.to_dict()} vs {b.config.to_dict()}"
        )
    if a.symmetric != b.symmetric:
        raise ConfigMismatchError("Сравнение oriented и symmetric профилей")
    return a._counts == b._counts

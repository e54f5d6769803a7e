"""
Non-identifiability Certificates
Сертификаты: исходная разметка, переставленная разметка с тем же профилем,
и данные перестановки. Сериализуются в JSON-совместимые словари и
перепроверяются без повторного поиска.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from services.lattice import (
    BoxRegion,
    ConfigMismatchError,
    Labeling,
    LatticeConfig,
    LatticeError,
    Vertex,
)
from services.profile import profiles_equal, shatter

logger = logging.getLogger(__name__)

Interval = Tuple[int, int]


def verify_nonidentifiable(a: Labeling, b: Labeling) -> bool:
    """True iff a != b и shatter(a) == shatter(b)"""
    if a.config != b.config:
        raise ConfigMismatchError(
            f"Разные конфигурации: {a.config.to_dict()} vs {b.config.to_dict()}"
        )
    if a == b:
        return False
    return profiles_equal(shatter(a), shatter(b))


def splice_intervals(codes: np.ndarray, J: Interval, J_prime: Interval) -> np.ndarray:
    """K1 + J' + K2 + J + K3 (J левее J', интервалы полуоткрытые)"""
    a, b = J
    c, e = J_prime
    return np.concatenate([codes[:a], codes[c:e], codes[b:c], codes[a:b], codes[e:]])


@dataclass(frozen=True)
class SwapCertificate1D:
    """Обмен интервалов J и J' (d = 1)"""

    B1: BoxRegion
    B3: BoxRegion
    B4: BoxRegion
    B6: BoxRegion
    J: Interval
    J_prime: Interval
    original: Labeling
    permuted: Labeling
    symmetric: bool = False

    def to_record(self) -> Dict[str, Any]:
        return {
            "kind": "interval-swap",
            "symmetric": self.symmetric,
            "config": self.original.config.to_dict(),
            "original": self.original.values().ravel().tolist(),
            "permuted": self.permuted.values().ravel().tolist(),
            "B1": self.B1.corner[0],
            "B3": self.B3.corner[0],
            "B4": self.B4.corner[0],
            "B6": self.B6.corner[0],
            "J": list(self.J),
            "J_prime": list(self.J_prime),
        }


@dataclass(frozen=True)
class SwapCertificateND:
    """Обмен меток 1 <-> 2 на V1' ∪ V2'"""

    V1: Tuple[Vertex, ...]
    V2: Tuple[Vertex, ...]
    original: Labeling
    permuted: Labeling
    symmetric: bool = False
    stats: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.V1)

    def to_record(self) -> Dict[str, Any]:
        return {
            "kind": "label-swap",
            "symmetric": self.symmetric,
            "config": self.original.config.to_dict(),
            "original": self.original.values().ravel().tolist(),
            "permuted": self.permuted.values().ravel().tolist(),
            "V1": [list(v) for v in self.V1],
            "V2": [list(v) for v in self.V2],
        }


class CertificateRecordError(LatticeError, ValueError):
    """Запись сертификата не разбирается"""
    pass


def _labeling_from_record(config: LatticeConfig, values) -> Labeling:
    arr = np.asarray(values, dtype=np.int64)
    if arr.size != config.vertex_count:
        raise CertificateRecordError(
            f"Ожидалось {config.vertex_count} меток, получено {arr.size}"
        )
    return Labeling.from_values(config, arr.reshape(config.shape))


def verify_certificate_record(record: Dict[str, Any]) -> bool:
    """
    Перепроверить сертификат по записи

    Проверяется, что permuted получается из original описанной
    перестановкой и что профили совпадают (в symmetric режиме — symmetric
    профили совпадают, а разметки не изоморфны).
    """
    try:
        config = LatticeConfig(**record["config"])
        original = _labeling_from_record(config, record["original"])
        permuted = _labeling_from_record(config, record["permuted"])
        kind = record["kind"]
    except (KeyError, TypeError) as e:
        raise CertificateRecordError(f"Неполная запись сертификата: {e}") from e

    rebuilt: Optional[np.ndarray]
    if kind == "interval-swap":
        J = tuple(record["J"])
        J_prime = tuple(record["J_prime"])
        rebuilt = splice_intervals(original.codes, J, J_prime)
    elif kind == "label-swap":
        from .label_swap import SwapPreconditionError, apply_swap

        try:
            rebuilt = apply_swap(
                original,
                [tuple(v) for v in record["V1"]],
                [tuple(v) for v in record["V2"]],
            ).codes
        except SwapPreconditionError as e:
            logger.warning(f"⚠️  Сертификат не проходит предусловия обмена: {e}")
            return False
    else:
        raise CertificateRecordError(f"Неизвестный тип сертификата: {kind}")

    if not np.array_equal(rebuilt.reshape(config.shape), permuted.codes):
        logger.warning("⚠️  permuted не совпадает с перестановкой original")
        return False

    if record.get("symmetric"):
        from services.symmetry import verify_nonidentifiable_symmetric

        return verify_nonidentifiable_symmetric(original, permuted)
    return verify_nonidentifiable(original, permuted)

"""
Labeling File
Бинарный файл разметки

Формат:
    "SGLB" | version | d, n, q (uint32 LE) | n^d байт (метка - 1), row-major
"""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from services.lattice import InvalidConfigError, Labeling, LatticeConfig, LatticeError

logger = logging.getLogger(__name__)

LABELING_MAGIC = b"SGLB"
LABELING_VERSION = 1

_HEADER = struct.Struct("<4sB3I")


class LabelingFileError(LatticeError):
    """Повреждённый или несовместимый файл разметки"""
    pass


def dump_labeling(labeling: Labeling) -> bytes:
    c = labeling.config
    return _HEADER.pack(LABELING_MAGIC, LABELING_VERSION, c.d, c.n, c.q) + labeling.to_bytes()


def load_labeling(data: bytes, r: int = 2) -> Labeling:
    """
    Разобрать байты файла разметки

    Args:
        data: Содержимое файла
        r: Сторона наблюдения для LatticeConfig (в файле не хранится)

    Raises:
        LabelingFileError: Неверная сигнатура, версия, длина или метка >= q
        InvalidConfigError: r не подходит к решётке из файла (r > n)
    """
    if len(data) < _HEADER.size:
        raise LabelingFileError("Файл короче заголовка")

    magic, version, d, n, q = _HEADER.unpack_from(data, 0)
    if magic != LABELING_MAGIC:
        raise LabelingFileError(f"Неверная сигнатура {magic!r}")
    if version != LABELING_VERSION:
        raise LabelingFileError(f"Неподдерживаемая версия {version}")

    try:
        LatticeConfig(d=d, n=n, q=q, r=2)
    except InvalidConfigError as e:
        raise LabelingFileError(f"Невалидные параметры в заголовке: {e}") from e
    config = LatticeConfig(d=d, n=n, q=q, r=r)

    body = data[_HEADER.size:]
    if len(body) != config.vertex_count:
        raise LabelingFileError(
            f"Ожидалось {config.vertex_count} байт меток, получено {len(body)}"
        )

    codes = np.frombuffer(body, dtype=np.uint8).reshape(config.shape)
    try:
        return Labeling(config, codes.copy())
    except InvalidConfigError as e:
        raise LabelingFileError(f"Невалидные метки: {e}") from e


def write_labeling_file(path: Union[str, Path], labeling: Labeling) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_labeling(labeling))
    logger.info(f"✅ Разметка записана: {path}")
    return path


def read_labeling_file(path: Union[str, Path], r: int = 2) -> Labeling:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise LabelingFileError(f"Не удалось прочитать {path}: {e}") from e
    return load_labeling(data, r=r)

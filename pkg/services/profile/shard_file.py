"""
Shard File
Бинарный файл профиля

Формат:
    "SGSL" | version (бит 7 = symmetric профиль) | d, n, q, r (uint32 LE)
    | количество записей (uint64 LE)
    | записи (encoded pattern, кратность uint32 LE), по возрастанию байтов
"""

import logging
import struct
from pathlib import Path
from typing import Union

from services.lattice import InvalidConfigError, LatticeConfig, LatticeError
from services.lattice.codec import CodecError, parse_encoding

from .profile import Profile

logger = logging.getLogger(__name__)

SHARD_MAGIC = b"SGSL"
SHARD_VERSION = 1
SYMMETRIC_FLAG = 0x80
MAX_MULTIPLICITY = 0xFFFFFFFF

_HEADER = struct.Struct("<4sB4IQ")


class ShardFileError(LatticeError):
    """Повреждённый или несовместимый shard-файл"""
    pass


def dump_profile(profile: Profile) -> bytes:
    """Сериализовать профиль в байты (детерминированно)"""
    c = profile.config
    version = SHARD_VERSION | (SYMMETRIC_FLAG if profile.symmetric else 0)
    parts = [_HEADER.pack(SHARD_MAGIC, version, c.d, c.n, c.q, c.r, profile.distinct)]
    for key, mult in profile.counts.items():
        if mult > MAX_MULTIPLICITY:
            raise ShardFileError(f"Кратность {mult} не помещается в uint32")
        parts.append(key)
        parts.append(struct.pack("<I", mult))
    return b"".join(parts)


def load_profile(data: bytes) -> Profile:
    """Разобрать байты shard-файла"""
    if len(data) < _HEADER.size:
        raise ShardFileError("Файл короче заголовка")

    magic, version, d, n, q, r, count = _HEADER.unpack_from(data, 0)
    if magic != SHARD_MAGIC:
        raise ShardFileError(f"Неверная сигнатура {magic!r}")
    if version & ~SYMMETRIC_FLAG != SHARD_VERSION:
        raise ShardFileError(f"Неподдерживаемая версия {version & ~SYMMETRIC_FLAG}")

    try:
        config = LatticeConfig(d=d, n=n, q=q, r=r)
    except InvalidConfigError as e:
        raise ShardFileError(f"Невалидные параметры в заголовке: {e}") from e

    counts = {}
    pos = _HEADER.size
    previous = b""
    for _ in range(count):
        try:
            _, mask, end = parse_encoding(data, pos)
        except CodecError as e:
            raise ShardFileError(f"Повреждённая запись на смещении {pos}: {e}") from e
        if mask is not None:
            raise ShardFileError("Шард с маской в shard-файле")
        if end + 4 > len(data):
            raise ShardFileError("Обрезанная кратность")

        key = bytes(data[pos:end])
        if key <= previous:
            raise ShardFileError("Записи не отсортированы по возрастанию")
        (mult,) = struct.unpack_from("<I", data, end)
        counts[key] = mult
        previous = key
        pos = end + 4

    if pos != len(data):
        raise ShardFileError(f"Лишние {len(data) - pos} байт в конце файла")

    try:
        return Profile(config, counts, symmetric=bool(version & SYMMETRIC_FLAG))
    except InvalidConfigError as e:
        raise ShardFileError(f"Невалидный профиль: {e}") from e


def write_shard_file(path: Union[str, Path], profile: Profile) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_profile(profile))
    logger.info(f"✅ Shard-файл записан: {path} ({profile.distinct} записей)")
    return path


def read_shard_file(path: Union[str, Path]) -> Profile:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ShardFileError(f"Не удалось прочитать {path}: {e}") from e
    profile = load_profile(data)
    logger.debug(f"Shard-файл прочитан: {path} -> {profile}")
    return profile

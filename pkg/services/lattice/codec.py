"""
Pattern Codec
Бинарный формат паттерна: ключ для мультимножеств и запись shard-файла

Формат:
    1 байт d (бит 7 выставлен, если паттерн с маской)
    d x uint16 little-endian — длины сторон
    [маска: row-major, 8 ячеек на байт, младший бит первый, добивка нулями]
    по одному байту (label - 1) на каждую присутствующую ячейку, row-major
"""

import struct
from typing import Optional, Sequence, Tuple

import numpy as np

MASKED_FLAG = 0x80
MAX_SIDE = 0xFFFF


class CodecError(ValueError):
    """Невалидная бинарная запись паттерна"""
    pass


def pattern_header(sides: Sequence[int], masked: bool = False) -> bytes:
    """Заголовок записи: d и длины сторон"""
    d = len(sides)
    if any(s < 1 or s > MAX_SIDE for s in sides):
        raise CodecError(f"Длина стороны вне диапазона uint16: {tuple(sides)}")
    flag = MASKED_FLAG if masked else 0
    return bytes([d | flag]) + struct.pack(f"<{d}H", *sides)


def encode_cells(codes: np.ndarray, mask: Optional[np.ndarray] = None) -> bytes:
    """
    Закодировать массив 0-based меток (форма = стороны паттерна)

    Args:
        codes: uint8 массив, label - 1
        mask: bool массив той же формы или None для полного паттерна
    """
    if mask is None:
        return pattern_header(codes.shape) + np.ascontiguousarray(codes, dtype=np.uint8).tobytes()

    flat_mask = np.ascontiguousarray(mask, dtype=bool).ravel()
    bitmap = np.packbits(flat_mask, bitorder="little").tobytes()
    present = np.ascontiguousarray(codes, dtype=np.uint8).ravel()[flat_mask]
    return pattern_header(codes.shape, masked=True) + bitmap + present.tobytes()


def parse_encoding(
        data: bytes,
        offset: int = 0
) -> Tuple[np.ndarray, Optional[np.ndarray], int]:
    """
    Разобрать одну запись начиная с offset

    Returns:
        (codes, mask или None, offset конца записи)
    """
    try:
        head = data[offset]
        d = head & ~MASKED_FLAG
        masked = bool(head & MASKED_FLAG)
        if d < 1:
            raise CodecError(f"Невалидная размерность d={d}")
        pos = offset + 1
        sides = struct.unpack_from(f"<{d}H", data, pos)
        pos += 2 * d
    except (IndexError, struct.error) as e:
        raise CodecError(f"Обрезанный заголовок паттерна: {e}") from e

    size = int(np.prod(sides))
    mask = None
    if masked:
        mask_len = (size + 7) // 8
        if pos + mask_len > len(data):
            raise CodecError("Обрезанная маска паттерна")
        bits = np.frombuffer(data, dtype=np.uint8, count=mask_len, offset=pos)
        flat_mask = np.unpackbits(bits, count=size, bitorder="little").astype(bool)
        pos += mask_len
        present = int(flat_mask.sum())
    else:
        present = size

    if pos + present > len(data):
        raise CodecError("Обрезанные ячейки паттерна")
    values = np.frombuffer(data, dtype=np.uint8, count=present, offset=pos)
    pos += present

    if masked:
        flat = np.zeros(size, dtype=np.uint8)
        flat[flat_mask] = values
        codes = flat.reshape(sides)
        mask = flat_mask.reshape(sides)
    else:
        codes = values.copy().reshape(sides)

    return codes, mask, pos

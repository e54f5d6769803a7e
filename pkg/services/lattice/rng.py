"""
Seeded PRNG streams
Counter-based генератор (Philox) с детерминированным разбиением на потоки
"""

import logging
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1


def _stream_key(stream: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(int(s) & SEED_MASK for s in stream)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Создать генератор для потока (seed, *stream)

    Один и тот же (seed, stream) всегда даёт одну и ту же последовательность,
    независимо от процесса или порядка запуска.

    Args:
        seed: Базовый 64-битный seed
        *stream: Индексы потока (например, параметры ячейки и номер trial)

    Returns:
        numpy Generator на базе Philox
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed) & SEED_MASK,
        spawn_key=_stream_key(stream),
    )
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *stream: int) -> int:
    """Вывести 64-битный seed дочернего потока (hash(seed, stream))"""
    sequence = np.random.SeedSequence(
        entropy=int(seed) & SEED_MASK,
        spawn_key=_stream_key(stream),
    )
    low, high = sequence.generate_state(2, dtype=np.uint32)
    return (int(high) << 32) | int(low)

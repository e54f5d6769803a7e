"""
Общие фикстуры и хелперы тестов
"""

import itertools
from typing import Iterator

import numpy as np
import pytest

from services.lattice import Labeling, LatticeConfig


def line(values, q: int = 4, r: int = 2) -> Labeling:
    """Разметка d=1 из 1-based меток"""
    config = LatticeConfig(d=1, n=len(values), q=q, r=r)
    return Labeling.from_values(config, values)


def grid(rows, q: int = 4, r: int = 2) -> Labeling:
    """Разметка d=2 из вложенного списка 1-based меток"""
    arr = np.asarray(rows)
    config = LatticeConfig(d=2, n=arr.shape[0], q=q, r=r)
    return Labeling.from_values(config, arr)


def all_labelings(config: LatticeConfig) -> Iterator[Labeling]:
    """Все q^(n^d) разметок в порядке перебора оракула"""
    for values in itertools.product(range(config.q), repeat=config.vertex_count):
        yield Labeling(config, np.array(values, dtype=np.uint8))


def constant(config: LatticeConfig, label: int = 1) -> Labeling:
    return Labeling(config, np.full(config.shape, label - 1, dtype=np.uint8))


@pytest.fixture
def small_config() -> LatticeConfig:
    return LatticeConfig(d=1, n=4, q=2, r=2)


@pytest.fixture
def sigma_1234() -> Labeling:
    return line([1, 2, 3, 4])


@pytest.fixture
def twin_pair():
    """Разные разметки с одинаковым профилем (d=1, n=4, q=2, r=2)"""
    return line([1, 2, 2, 1], q=2), line([2, 1, 2, 2], q=2)

"""
Union-Find
Непересекающиеся множества на массиве родителей (компоненты боксов 𝓑_{2r})

parent[i] <= i, корень компоненты: её наименьший индекс. Объединения
выполняются пачками пар, сжатие путей: pointer jumping до неподвижной точки.
"""

from typing import List

import numpy as np


class ArrayUnionFind:
    """
    Union-Find над индексами 0..size-1

    >>> uf = ArrayUnionFind(4)
    >>> uf.union(1, 2)
    >>> uf.union(3, 2)
    >>> int(uf.find(3))
    1
    """

    def __init__(self, size: int):
        self.parent = np.arange(size, dtype=np.int64)

    def compress(self):
        while True:
            grand = self.parent[self.parent]
            if np.array_equal(grand, self.parent):
                return
            self.parent = grand

    def find(self, x):
        self.compress()
        return self.parent[x]

    def union(self, x: int, y: int):
        self.union_pairs(np.array([x]), np.array([y]))

    def union_pairs(self, u: np.ndarray, v: np.ndarray):
        """Объединить u[k] и v[k] для всех k"""
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        while u.size:
            self.compress()
            ru, rv = self.parent[u], self.parent[v]
            differ = ru != rv
            if not differ.any():
                return
            u, v, ru, rv = u[differ], v[differ], ru[differ], rv[differ]
            # корень с большим индексом подвешивается к меньшему
            np.minimum.at(self.parent, np.maximum(ru, rv), np.minimum(ru, rv))

    def roots(self) -> np.ndarray:
        self.compress()
        return self.parent.copy()

    def groups(self, members: np.ndarray) -> List[np.ndarray]:
        """Компоненты среди members, по возрастанию корня"""
        members = np.asarray(members, dtype=np.int64)
        if not members.size:
            return []
        labels = self.roots()[members]
        order = np.argsort(labels, kind="stable")
        _, starts = np.unique(labels[order], return_index=True)
        return [np.sort(part) for part in np.split(members[order], starts[1:])]

"""
Threshold Calculator
Граница идентифицируемости q^(r^d) ~ n^d и фактический ε конфигурации
"""

import math

from services.lattice import InvalidConfigError


def _check(n: float, q: float):
    if n < 2 or q < 2:
        raise InvalidConfigError(f"Нужно n >= 2 и q >= 2, получено n={n}, q={q}")


def critical_r(d: int, n: float, q: float) -> float:
    """
    Критическая сторона наблюдения при ε = 0

    Args:
        d: Размерность
        n: Сторона Λ_n
        q: Размер алфавита

    Returns:
        2·ln n / ln q для d = 1, (d·ln n / ln q)^(1/d) для d >= 2
    """
    _check(n, q)
    ratio = math.log(n) / math.log(q)
    if d == 1:
        return 2 * ratio
    return (d * ratio) ** (1 / d)


def implied_epsilon(d: int, n: int, q: int, r: int) -> float:
    """
    ε, при котором q^(r^d) = n^(d(1+ε))

    Положительный ε — supercritical режим, отрицательный — subcritical.
    """
    _check(n, q)
    return (r ** d) * math.log(q) / (d * math.log(n)) - 1

"""
Биномиальная статистика: веса подмножеств, оценки частот и интервалы Уилсона.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import binom

from dsampler.config import WILSON_Z


@dataclass(frozen=True)
class RateEstimate:
    """
    Оценка частоты m из N.

    frozen означает, что частота известна точно (дисперсия 0);
    замороженная оценка всегда имеет m = 0 или m = N.
    """
    m: int
    n: int
    frozen: bool = False

    def __post_init__(self):
        if not 0 <= self.m <= self.n:
            raise ValueError(f"Некорректная оценка частоты: {self.m} из {self.n}")
        if self.frozen and self.m not in (0, self.n):
            raise ValueError("Замороженная оценка допускает только m = 0 или m = N")

    @property
    def rate(self) -> float:
        if self.n == 0:
            raise ValueError("Частота не определена при N = 0")
        return self.m / self.n

    def variance(self, z: float = WILSON_Z) -> float:
        return 0.0 if self.frozen else wilson_variance(self.m, self.n, z)


# === Биномиальные веса ===

def _check_rate(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Вероятность ошибки вне [0, 1]: {p}")


def binomial_factor(n: int, w: int, p: float) -> float:
    """
    C(n, w) p^w (1-p)^(n-w).

    Raises:
        ValueError: Если w вне 0..n или p вне [0, 1]
    """
    if w < 0 or w > n:
        raise ValueError(f"Вес подмножества {w} вне диапазона 0..{n}")
    _check_rate(p)
    return float(np.exp(binom.logpmf(w, n, p)))


def multi_binomial_factor(counts: Sequence[int], weights: Sequence[int], rates: Sequence[float]) -> float:
    """Произведение биномиальных весов по категориям."""
    if not (len(counts) == len(weights) == len(rates)):
        raise ValueError("Длины векторов счётчиков, весов и вероятностей не совпадают")
    return math.prod(binomial_factor(n, w, p) for w, n, p in zip(weights, counts, rates))


def single_circuit_cutoff(n: int, w_max: int, p: float) -> float:
    """Вероятность более чем w_max ошибок на n местах."""
    if w_max < 0 or w_max > n:
        raise ValueError(f"Предельный вес {w_max} вне диапазона 0..{n}")
    _check_rate(p)
    return min(1.0, max(0.0, float(binom.sf(w_max, n, p))))


def weight_distribution(n: int, p: float) -> np.ndarray:
    """Вектор A_w для w = 0..n."""
    return binom.pmf(np.arange(n + 1), n, p)


# === Интервалы ===

def wilson_variance(m: float, n: float, z: float = WILSON_Z) -> float:
    """
    Квадрат полуширины интервала Уилсона.

    Допускает дробные m и n (гипотетические обновления ERU).
    """
    if n <= 0:
        raise ValueError("Интервал Уилсона не определён при N = 0")
    q = m / n
    return z * z * (n * q * (1 - q) + z * z / 4) / (n + z * z) ** 2


def wilson_interval(m: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    """
    Интервал Уилсона для частоты m/n.

    Returns:
        (нижняя граница, верхняя граница), обрезанные до [0, 1]
    """
    if n <= 0:
        raise ValueError("Интервал Уилсона не определён при N = 0")
    q = m / n
    denom = 1 + z * z / n
    center = (q + z * z / (2 * n)) / denom
    half = z / denom * math.sqrt(q * (1 - q) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def wald_error(q_hat: float, n: int) -> float:
    """Стандартная ошибка прямого Монте-Карло sqrt(q(1-q)/n) для оценки частоты q_hat."""
    if n <= 0:
        raise ValueError("Ошибка не определена при N = 0")
    _check_rate(q_hat)
    return math.sqrt(q_hat * (1 - q_hat) / n)


def subset_sampling_error(factors: Sequence[float], rates: Sequence[float], shots: Sequence[int]) -> float:
    """
    Ошибка оценки одноуровневого подмножественного сэмплирования.

    Args:
        factors: Биномиальные веса подмножеств A_w
        rates: Наблюдаемые частоты отказа в подмножествах
        shots: Число выстрелов в подмножествах
    """
    total = math.fsum(a * a * q * (1 - q) / n for a, q, n in zip(factors, rates, shots) if n > 0)
    return math.sqrt(total)


def binomial_cutoff_for(counts: Sequence[int], sampled: Sequence[Sequence[int]], rates: Sequence[float]) -> float:
    """
    Вероятностная масса несэмплированных подмножеств схемы.

    Для одной категории с префиксом 0..w_max считается через функцию выживания,
    иначе как 1 минус компенсированная сумма биномиальных весов.
    """
    sampled = {tuple(w) for w in sampled}
    if len(counts) == 1 and sampled:
        w_max = max(w[0] for w in sampled)
        if sampled == {(w,) for w in range(w_max + 1)}:
            return single_circuit_cutoff(counts[0], w_max, rates[0])
    total = math.fsum(multi_binomial_factor(counts, w, rates) for w in sampled)
    return min(1.0, max(0.0, 1.0 - total))

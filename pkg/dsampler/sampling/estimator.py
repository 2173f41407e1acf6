"""
Оценщик по дереву событий: математическое ожидание и дисперсия суммы
произведений вдоль путей.

Дерево оценки состоит из узлов схем (сумма по подмножествам с биномиальными
весами плюс отсечка) и узлов подмножеств (переход Бернулли не более чем
в две ветви). Переходы разных узлов независимы.
"""

import math
from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Branch:
    """
    Ветвь узла подмножества.

    Attributes:
        rate: Частота перехода в ветвь (вторая ветвь берёт 1 - q первой)
        target: Поддерево схемы или число (1 - отказ, 0 - без отказа, δ-узел)
    """
    rate: float
    target: Union["CircuitEval", float]


@dataclass(frozen=True)
class SubsetEval:
    """
    Узел подмножества.

    Attributes:
        factor: Биномиальный вес подмножества A
        variance: Дисперсия частоты первой ветви V (0 для точно известных)
        branches: Одна или две ветви; при одной ветви остаток 1 - q ведёт в 0
    """
    factor: float
    variance: float
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class CircuitEval:
    """Узел схемы: подмножества и детерминированный вклад отсечки."""
    subsets: tuple[SubsetEval, ...] = ()
    cutoff: float = 0.0


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float


def _target_moments(target) -> Moments:
    if isinstance(target, CircuitEval):
        return circuit_moments(target)
    return Moments(float(target), 0.0)


def subset_moments(subset: SubsetEval) -> Moments:
    """
    Моменты Q·X1 + (1 - Q)·X2 при независимых Q, X1, X2:
    Var = V·[(m1 - m2)² + v1 + v2] + q²·v1 + (1 - q)²·v2.
    """
    if not subset.branches or len(subset.branches) > 2:
        raise ValueError("Узел подмножества должен иметь одну или две ветви")
    first = subset.branches[0]
    m1 = _target_moments(first.target)
    q = first.rate
    if len(subset.branches) == 2:
        second = subset.branches[1]
        m2 = _target_moments(second.target)
        rest = second.rate
    else:
        m2 = Moments(0.0, 0.0)
        rest = 1.0 - q
    mean = q * m1.mean + rest * m2.mean
    spread = (m1.mean - m2.mean) ** 2 + m1.variance + m2.variance
    variance = subset.variance * spread + q * q * m1.variance + rest * rest * m2.variance
    return Moments(mean, variance)


def circuit_moments(node: CircuitEval) -> Moments:
    """Моменты суммы по подмножествам, вычисляемые рекурсивно от листьев."""
    means = [node.cutoff]
    variances = []
    for subset in node.subsets:
        moments = subset_moments(subset)
        means.append(subset.factor * moments.mean)
        variances.append(subset.factor * subset.factor * moments.variance)
    return Moments(math.fsum(means), max(0.0, math.fsum(variances)))


# === Попарный алгоритм (контрольный) ===

@dataclass(frozen=True)
class _Factor:
    key: tuple
    mean: float
    variance: float


def _paths(node: CircuitEval, prefix: tuple[_Factor, ...]) -> Iterator[tuple[_Factor, ...]]:
    if node.cutoff:
        yield prefix + (_Factor(("cut", id(node)), node.cutoff, 0.0),)
    for subset in node.subsets:
        head = prefix + (_Factor(("A", id(subset)), subset.factor, 0.0),)
        rates = [b.rate for b in subset.branches]
        if len(rates) == 1:
            rates.append(1.0 - rates[0])
        for idx, branch in enumerate(subset.branches):
            step = head + (_Factor(("Q", id(subset), idx), rates[idx], subset.variance),)
            if isinstance(branch.target, CircuitEval):
                yield from _paths(branch.target, step)
            else:
                yield step + (_Factor(("c", id(subset), idx), float(branch.target), 0.0),)


def _product_moments(factors) -> tuple[float, float]:
    mean = math.prod(f.mean for f in factors)
    second = math.prod(f.mean * f.mean + f.variance for f in factors)
    return mean, second - mean * mean


def pairwise_moments(node: CircuitEval) -> Moments:
    """
    Те же моменты через явный перебор путей: дисперсии путей по формуле
    Гудмана плюс попарные ковариации в точке расхождения путей.
    """
    paths = list(_paths(node, ()))
    means = []
    terms = []
    for path in paths:
        mean, variance = _product_moments(path)
        means.append(mean)
        terms.append(variance)
    for i in range(len(paths)):
        for j in range(i + 1, len(paths)):
            a, b = paths[i], paths[j]
            k = 0
            while a[k].key == b[k].key:
                k += 1
            mu_u, var_u = _product_moments(a[:k])
            ka, kb = a[k].key, b[k].key
            if ka[0] == kb[0] == "Q" and ka[1] == kb[1]:
                # Расхождение в узле подмножества: Q и 1 - Q одной частоты
                e_a, _ = _product_moments(a[k + 1:])
                e_b, _ = _product_moments(b[k + 1:])
                cov = e_a * e_b * (var_u * a[k].mean * b[k].mean - a[k].variance * (var_u + mu_u * mu_u))
            else:
                e_a, _ = _product_moments(a[k:])
                e_b, _ = _product_moments(b[k:])
                cov = e_a * e_b * var_u
            terms.append(2.0 * cov)
    return Moments(math.fsum(means), math.fsum(terms))


def path_variance(factor: float, steps) -> float:
    """
    Дисперсия одного пути по формуле Гудмана.

    Args:
        factor: Произведение биномиальных весов вдоль пути
        steps: Пары (q, V) частот перехода вдоль пути

    Returns:
        factor² · [Π(V + q²) - Π q²]
    """
    steps = list(steps)
    second = math.prod(v + q * q for q, v in steps)
    first = math.prod(q * q for q, _ in steps)
    return factor * factor * (second - first)

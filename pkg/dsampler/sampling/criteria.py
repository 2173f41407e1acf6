"""
Критерии выбора подмножества ошибок: биномиальный и ERU.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import binom

from dsampler.config import ERU_ASSUMED_FAIL, ERU_RUNNING_AVERAGE, WILSON_Z
from dsampler.errors import NoiseError
from dsampler.sampling.bounds import Hypothesis, bounds
from dsampler.sampling.tree import CircuitNode, NodeKey, SampleTree, Weight


def choose_subset_binomial(counts: Sequence[int], rates: Sequence[float], rng,
                           prohibit_zero: bool = False) -> Weight:
    """
    Разыграть вектор весов с вероятностью A_w(p).

    При prohibit_zero нулевой вектор исключается с перенормировкой: сначала
    выбирается первая ненулевая категория, затем её вес из усечённого
    биномиального распределения, остальные категории разыгрываются свободно.
    """
    if not prohibit_zero:
        return tuple(int(rng.binomial(n, p)) for n, p in zip(counts, rates))

    zero = np.array([binom.pmf(0, n, p) for n, p in zip(counts, rates)], dtype=float)
    total = 1.0 - float(np.prod(zero))
    if total <= 0.0:
        raise NoiseError("Запрет нулевого веса невозможен: вся масса в подмножестве без ошибок")
    # P(первая ненулевая категория = k)
    before = np.concatenate(([1.0], np.cumprod(zero)[:-1]))
    probs = before * (1.0 - zero) / total
    first = int(rng.choice(len(counts), p=probs / probs.sum()))

    weights = []
    for k, (n, p) in enumerate(zip(counts, rates)):
        if k < first:
            weights.append(0)
        elif k == first:
            u = rng.uniform(zero[k], 1.0)
            weights.append(max(1, int(binom.ppf(u, n, p))))
        else:
            weights.append(int(rng.binomial(n, p)))
    return tuple(weights)


@dataclass(frozen=True)
class EruOptions:
    """
    Параметры критерия ERU.

    Attributes:
        assumed_fail: Предполагаемая частота отказа нового подмножества
        running_average: Брать вместо неё среднюю частоту отказа листьев дерева
        z: Квантиль интервала Уилсона
    """
    assumed_fail: float = ERU_ASSUMED_FAIL
    running_average: bool = ERU_RUNNING_AVERAGE
    z: float = WILSON_Z


def _weights_with_sum(counts: Sequence[int], total: int) -> list[Weight]:
    if len(counts) == 1:
        return [(total,)] if total <= counts[0] else []
    out = []
    for head in range(min(counts[0], total) + 1):
        out += [(head,) + rest for rest in _weights_with_sum(counts[1:], total - head)]
    return out


def eru_candidates(tree: SampleTree, node: CircuitNode) -> list[Weight]:
    """Все открытые подмножества и неоткрытые с минимальным суммарным весом."""
    counts = tree.circuit_counts[node.circuit]
    candidates = list(node.subsets)
    for total in range(sum(counts) + 1):
        fresh = [w for w in _weights_with_sum(counts, total) if w not in node.subsets]
        if fresh:
            candidates += fresh
            break
    return sorted(candidates, key=lambda w: (sum(w), w))


def _assumed_fail(tree: SampleTree, options: EruOptions) -> float:
    if not options.running_average:
        return options.assumed_fail
    rates = [s.failures / s.shots for n, s in tree.walk() if s.is_terminal and not tree.is_frozen(n, s)]
    return sum(rates) / len(rates) if rates else options.assumed_fail


def eru_deltas(tree: SampleTree, key: NodeKey, rates: Sequence[float],
               options: EruOptions = EruOptions()) -> dict[Weight, float]:
    """
    Ожидаемое снижение неопределённости Δ(w) для всех кандидатов узла.

    Δ(w) = η - [q·η(+) + (1 - q)·η(-)], где η(±) вычислены со сдвинутыми
    счётчиками (m + 1, N + 1) и (m, N + 1). Для неоткрытого подмножества оба
    исхода совпадают: добавляется лист с N = 1 и предполагаемой частотой отказа.
    """
    node = tree.find(key)
    if node is None:
        return {}
    base = bounds(tree, rates, options.z).eta
    fail = _assumed_fail(tree, options)
    deltas = {}
    for weight in eru_candidates(tree, node):
        subset = node.subsets.get(weight)
        if subset is None:
            eta = bounds(tree, rates, options.z, Hypothesis(opened={(key, weight): fail})).eta
            deltas[weight] = base - eta
            continue
        if tree.is_frozen(node, subset):
            deltas[weight] = 0.0
            continue
        est = tree.estimate(node, subset)
        q = est.m / est.n
        expected = 0.0
        if q > 0:
            plus = Hypothesis(counts={(key, weight): (est.m + 1, est.n + 1)})
            expected += q * bounds(tree, rates, options.z, plus).eta
        if q < 1:
            minus = Hypothesis(counts={(key, weight): (est.m, est.n + 1)})
            expected += (1 - q) * bounds(tree, rates, options.z, minus).eta
        deltas[weight] = base - expected
    return deltas


def choose_subset_eru(tree: SampleTree, key: NodeKey, rates: Sequence[float],
                      options: EruOptions = EruOptions()) -> Weight:
    """
    Вектор весов с максимальным Δ(w); при равенстве выигрывает меньший вес.

    Для ещё не открытого контекста возвращается нулевой вектор.
    """
    deltas = eru_deltas(tree, key, rates, options)
    if not deltas:
        return (0,) * len(tree.categories)
    best = None
    for weight, value in deltas.items():
        if best is None or value > deltas[best]:
            best = weight
    return best

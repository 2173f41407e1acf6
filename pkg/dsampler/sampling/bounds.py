"""
Границы частоты отказа по дереву событий при произвольных вероятностях ошибок.

Нижняя граница p_L суммирует пути, заканчивающиеся отказом. Верхняя граница
дополнительно относит к отказу всю непросэмплированную массу: отсечку каждой
схемы и недостающие ветви неполных переходов (δ-узлы). Для FT-протоколов
(t >= 1) масса путей с суммарным весом <= t оценивается как L·(1 - M0).
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from dsampler.config import WILSON_Z
from dsampler.sampling.estimator import Branch, CircuitEval, SubsetEval, circuit_moments
from dsampler.sampling.tree import CircuitNode, NodeKey, SampleTree, SubsetNode, Weight
from dsampler.states import DeltaKind, Verdict
from dsampler.utils.stats import binomial_cutoff_for, multi_binomial_factor, wilson_variance


@dataclass(frozen=True)
class BoundsResult:
    """Границы и неопределённости при заданных вероятностях ошибок."""
    rates: tuple[float, ...]
    p_lower: float
    p_upper: float
    sigma_lower: float
    sigma_upper: float
    delta: float
    eta: float
    p_hat: float


@dataclass(frozen=True)
class Hypothesis:
    """
    Гипотетическое изменение дерева для критерия ERU.

    Attributes:
        counts: (ключ узла, w) -> (m первого исхода, N) вместо наблюдённых
        opened: (ключ узла, w) -> предполагаемая частота отказа нового подмножества с N = 1
    """
    counts: Mapping[tuple[NodeKey, Weight], tuple[float, float]] = field(default_factory=dict)
    opened: Mapping[tuple[NodeKey, Weight], float] = field(default_factory=dict)


def minimal_fault_free_factor(tree: SampleTree, rates: Sequence[float]) -> float:
    """M0: минимальный вес подмножества без ошибок среди всех схем протокола."""
    return min(multi_binomial_factor(c, [0] * len(c), rates) for c in tree.circuit_counts.values())


def weights_up_to(counts: Sequence[int], total: int) -> list[Weight]:
    """Все векторы весов с суммой не больше total."""
    if total < 0:
        return []
    ranges = [range(min(n, total) + 1) for n in counts]
    return sorted(w for w in itertools.product(*ranges) if sum(w) <= total)


class _Builder:
    def __init__(self, tree: SampleTree, rates: Sequence[float], upper: bool, z: float,
                 hypothesis: Hypothesis | None):
        self.tree = tree
        self.rates = tuple(rates)
        self.upper = upper
        self.z = z
        self.hypothesis = hypothesis or Hypothesis()
        self.ft_value = min(1.0, tree.max_ft_length * (1.0 - minimal_fault_free_factor(tree, rates)))

    def delta_value(self, kind: DeltaKind) -> float:
        return self.ft_value if kind is DeltaKind.L_TIMES_ONE_MINUS_M0 else 1.0

    def delta_kind(self, path_weight: int) -> DeltaKind:
        if self.tree.ft_order >= 1 and path_weight <= self.tree.ft_order:
            return DeltaKind.L_TIMES_ONE_MINUS_M0
        return DeltaKind.ONE

    def circuit(self, node: CircuitNode) -> CircuitEval:
        counts = self.tree.circuit_counts[node.circuit]
        subsets = []
        sampled = []
        for weight in sorted(node.subsets):
            subsets.append(self.subset(node, node.subsets[weight], counts))
            sampled.append(weight)
        for (key, weight), fail_rate in sorted(self.hypothesis.opened.items()):
            if key == node.key and weight not in node.subsets:
                subsets.append(self.opened(node, weight, counts, fail_rate))
                sampled.append(weight)

        cutoff = 0.0
        if self.upper:
            virtual = []
            if self.tree.ft_order >= 1:
                virtual = [w for w in weights_up_to(counts, self.tree.ft_order - node.path_weight)
                           if w not in sampled]
            parts = [multi_binomial_factor(counts, w, self.rates) * self.ft_value for w in virtual]
            parts.append(binomial_cutoff_for(counts, sampled + virtual, self.rates))
            cutoff = math.fsum(parts)
        return CircuitEval(tuple(subsets), cutoff)

    def subset(self, node: CircuitNode, subset: SubsetNode, counts) -> SubsetEval:
        factor = multi_binomial_factor(counts, subset.weight, self.rates)
        estimate = self.tree.estimate(node, subset)
        m, n = self.hypothesis.counts.get((node.key, subset.weight), (estimate.m, estimate.n))
        q = m / n
        variance = 0.0 if estimate.frozen else wilson_variance(m, n, self.z)
        if subset.is_terminal:
            return SubsetEval(factor, variance, (Branch(q, 1.0),))

        labels = subset.labels
        targets = [self.target(subset, label) for label in labels]
        if len(labels) == 2:
            return SubsetEval(factor, variance, (Branch(q, targets[0]), Branch(1.0 - q, targets[1])))
        first = Branch(q, targets[0])
        if self.upper and not estimate.frozen:
            missing = self.delta_value(self.delta_kind(subset.path_weight))
            return SubsetEval(factor, variance, (first, Branch(1.0 - q, missing)))
        return SubsetEval(factor, variance, (first,))

    def opened(self, node: CircuitNode, weight: Weight, counts, fail_rate: float) -> SubsetEval:
        factor = multi_binomial_factor(counts, weight, self.rates)
        path_weight = node.path_weight + sum(weight)
        if path_weight == 0 or path_weight <= self.tree.ft_order:
            return SubsetEval(factor, 0.0, (Branch(0.0, 1.0),))
        return SubsetEval(factor, wilson_variance(fail_rate, 1.0, self.z), (Branch(fail_rate, 1.0),))

    def target(self, subset: SubsetNode, label: str):
        if label == Verdict.FAIL.value:
            return 1.0
        if label == Verdict.NOFAIL.value:
            return 0.0
        return self.circuit(subset.children[label])


def evaluation_tree(tree: SampleTree, rates: Sequence[float], upper: bool, z: float = WILSON_Z,
                    hypothesis: Hypothesis | None = None) -> CircuitEval:
    """Дерево оценки нижней (upper=False) или верхней границы."""
    if len(rates) != len(tree.categories):
        raise ValueError(f"Ожидалось {len(tree.categories)} вероятностей, получено {len(rates)}")
    return _Builder(tree, rates, upper, z, hypothesis).circuit(tree.root)


def p_lower(tree: SampleTree, rates: Sequence[float]) -> float:
    return circuit_moments(evaluation_tree(tree, rates, upper=False)).mean


def delta_total(tree: SampleTree, rates: Sequence[float]) -> float:
    """Полный вклад δ-узлов и отсечек: p_U - p_L."""
    lower = circuit_moments(evaluation_tree(tree, rates, upper=False)).mean
    upper = circuit_moments(evaluation_tree(tree, rates, upper=True)).mean
    return min(max(upper - lower, 0.0), 1.0 - lower)


def var_bounds(tree: SampleTree, rates: Sequence[float], z: float = WILSON_Z) -> tuple[float, float]:
    """(Var[p_L], Var[p_U])."""
    lower = circuit_moments(evaluation_tree(tree, rates, upper=False, z=z))
    upper = circuit_moments(evaluation_tree(tree, rates, upper=True, z=z))
    return lower.variance, upper.variance


def bounds(tree: SampleTree, rates: Sequence[float], z: float = WILSON_Z,
           hypothesis: Hypothesis | None = None) -> BoundsResult:
    """
    Все границы при заданных вероятностях ошибок.

    δ обрезается до [0, 1 - p_L], так что p_U = p_L + δ <= 1.

    Args:
        tree: Дерево событий
        rates: Вероятности ошибок по категориям
        z: Квантиль интервала Уилсона
        hypothesis: Гипотетические счётчики для ERU

    Returns:
        BoundsResult
    """
    lower = circuit_moments(evaluation_tree(tree, rates, False, z, hypothesis))
    upper = circuit_moments(evaluation_tree(tree, rates, True, z, hypothesis))
    p_l = min(max(lower.mean, 0.0), 1.0)
    delta = min(max(upper.mean - p_l, 0.0), 1.0 - p_l)
    p_u = p_l + delta
    sigma_l = math.sqrt(lower.variance)
    sigma_u = math.sqrt(upper.variance)
    return BoundsResult(
        rates=tuple(float(r) for r in rates),
        p_lower=p_l,
        p_upper=p_u,
        sigma_lower=sigma_l,
        sigma_upper=sigma_u,
        delta=delta,
        eta=sigma_l + sigma_u + delta,
        p_hat=(p_l + p_u) / 2,
    )

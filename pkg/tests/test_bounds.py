"""
Тесты оценщика и границ частоты отказа.
"""

import numpy as np
import pytest

from dsampler.sampling.bounds import (
    Hypothesis,
    bounds,
    delta_total,
    evaluation_tree,
    minimal_fault_free_factor,
    p_lower,
    var_bounds,
    weights_up_to,
)
from dsampler.sampling.estimator import (
    Branch,
    CircuitEval,
    SubsetEval,
    circuit_moments,
    pairwise_moments,
    path_variance,
)
from dsampler.sampling.tree import SampleTree, TraceStep
from dsampler.utils.stats import binomial_factor, single_circuit_cutoff, wilson_variance


def _nested(b, c, qj, vj, qk, vk, ql, vl):
    """A·[Q_j·C·Q_k + (1 - Q_j)·Q_l]: развилка с двумя поддеревьями."""
    left = CircuitEval((SubsetEval(c, vk, (Branch(qk, 1.0),)),))
    right = CircuitEval((SubsetEval(1.0, vl, (Branch(ql, 1.0),)),))
    return CircuitEval((SubsetEval(b, vj, (Branch(qj, left), Branch(1 - qj, right))),))


def _nested_variance(b, c, qj, vj, qk, vk, ql, vl):
    u = c * qk
    w = ql
    mean = qj * u + (1 - qj) * w
    second = ((vj + qj ** 2) * (c * c * vk + c * c * qk * qk)
              + 2 * (qj - vj - qj ** 2) * u * w
              + (vj + (1 - qj) ** 2) * (vl + ql * ql))
    return b * b * (second - mean * mean)


def _counts(**labels):
    return {label: n for label, n in labels.items() if n}


class TestEstimator:
    """Тесты моментов суммы произведений."""

    def test_path_variance(self):
        """Формула Гудмана для одного шага."""
        assert path_variance(2.0, [(0.5, 0.01)]) == pytest.approx(0.04)
        assert path_variance(1.0, [(0.3, 0.0), (0.2, 0.0)]) == 0.0

    def test_single_branch(self):
        """Одна ветвь: остаток 1 - q ведёт в 0."""
        moments = circuit_moments(CircuitEval((SubsetEval(0.5, 0.01, (Branch(0.2, 1.0),)),), cutoff=0.1))
        assert moments.mean == pytest.approx(0.5 * 0.2 + 0.1)
        assert moments.variance == pytest.approx(0.25 * 0.01)

    @pytest.mark.parametrize("trees", [50, pytest.param(1000, marks=pytest.mark.slow)])
    def test_closed_form(self, trees):
        """Рекурсия и попарный алгоритм совпадают с явной формулой на случайных деревьях."""
        rng = np.random.default_rng(5)
        for _ in range(trees):
            b, c = rng.uniform(0.05, 1.0, size=2)
            qj, qk, ql = rng.uniform(0.0, 1.0, size=3)
            vj, vk, vl = rng.uniform(0.0, 0.05, size=3)
            tree = _nested(b, c, qj, vj, qk, vk, ql, vl)
            expected = _nested_variance(b, c, qj, vj, qk, vk, ql, vl)
            assert circuit_moments(tree).variance == pytest.approx(expected, rel=1e-9, abs=1e-12)
            assert pairwise_moments(tree).variance == pytest.approx(expected, rel=1e-9, abs=1e-12)
            assert pairwise_moments(tree).mean == pytest.approx(circuit_moments(tree).mean, abs=1e-12)

    def test_recursive_matches_pairwise_on_tree(self, branching_tree):
        """На реальном дереве обе схемы вычисления дают одно и то же."""
        for upper in (False, True):
            ir = evaluation_tree(branching_tree, (0.1,), upper)
            recursive = circuit_moments(ir)
            pairwise = pairwise_moments(ir)
            assert recursive.mean == pytest.approx(pairwise.mean, rel=1e-10)
            assert recursive.variance == pytest.approx(pairwise.variance, rel=1e-9)

    def test_invalid_subset(self):
        """Узел подмножества без ветвей недопустим."""
        with pytest.raises(ValueError):
            circuit_moments(CircuitEval((SubsetEval(1.0, 0.0, ()),)))


class TestBranchCovariance:
    """
    Две стадии, пять выстрелов: J -> K при исходе 0, J -> L при исходе 1.

    Истории: h_j = [0, 0, 1, 0, 1], h_k = [1, 0, 1], h_l = [0, 1].
    """

    P = 0.05

    @pytest.fixture
    def tree(self):
        tree = SampleTree("cov", "J", {"J": (3,), "K": (2,), "L": (2,)}, ("p",))
        to_k = TraceStep("J", (1,), "K")
        to_l = TraceStep("J", (1,), "L")
        for first, second in [(to_k, TraceStep("K", (1,), "FAIL")), (to_k, TraceStep("K", (1,), "NOFAIL")),
                              (to_l, TraceStep("L", (1,), "NOFAIL")), (to_k, TraceStep("K", (1,), "FAIL")),
                              (to_l, TraceStep("L", (1,), "FAIL"))]:
            tree.record_shot([first, second])
        return tree

    def test_later_rates_are_uncorrelated(self):
        """Подсписок h_j, ведущий в K, постоянен: выборочная ковариация с h_k равна 0."""
        h_j = np.array([0, 0, 1, 0, 1])
        h_k = np.array([1, 0, 1])
        h_l = np.array([0, 1])
        assert np.cov(h_j[h_j == 0], h_k, bias=True)[0, 1] == 0.0
        assert np.cov(h_j[h_j == 1], h_l, bias=True)[0, 1] == 0.0

    def test_mean(self, tree):
        """p_L = A·[q_j·B·q_k + (1 - q_j)·C·q_l] с q_j = 3/5, q_k = 2/3, q_l = 1/2."""
        a = binomial_factor(3, 1, self.P)
        b = binomial_factor(2, 1, self.P)
        expected = a * (3 / 5 * b * 2 / 3 + 2 / 5 * b * 1 / 2)
        assert p_lower(tree, (self.P,)) == pytest.approx(expected)

    def test_variance_with_negative_covariance(self, tree):
        """Дисперсия p_L включает ковариацию ветвей -2BC·q_k·q_l·V_j."""
        a = binomial_factor(3, 1, self.P)
        b = c = binomial_factor(2, 1, self.P)
        qj, qk, ql = 3 / 5, 2 / 3, 1 / 2
        vj = wilson_variance(3, 5, 1.0)
        vk = wilson_variance(2, 3, 1.0)
        vl = wilson_variance(1, 2, 1.0)
        independent = (b * b * (qj * qj * vk + qk * qk * vj + vj * vk)
                       + c * c * (ql * ql * vj + (1 - qj) ** 2 * vl + vj * vl))
        covariance = -2 * b * c * qk * ql * vj
        var_l, _ = var_bounds(tree, (self.P,), z=1.0)
        assert var_l == pytest.approx(a * a * (independent + covariance), rel=1e-10)
        assert var_l < a * a * independent
        ir = evaluation_tree(tree, (self.P,), upper=False, z=1.0)
        assert pairwise_moments(ir).variance == pytest.approx(var_l, rel=1e-10)


class TestBounds:
    """Тесты границ на синтетическом дереве."""

    P = 0.1

    def _factors(self, n):
        return binomial_factor(n, 0, self.P), binomial_factor(n, 1, self.P)

    def test_lower_bound(self, branching_tree):
        """p_L суммирует пути, заканчивающиеся отказом."""
        _, a1 = self._factors(4)
        b0, b1 = self._factors(3)
        _, c1 = self._factors(2)
        expected = a1 * (3 / 25 + 22 / 25 * (b0 * 9 / 15 * (c1 * 2 / 5) + b1 * 2 / 7))
        assert p_lower(branching_tree, (self.P,)) == pytest.approx(expected)

    def test_delta_is_cutoff_mass(self, branching_tree):
        """Без неполных переходов δ состоит только из отсечек схем."""
        b0, _ = self._factors(3)
        _, a1 = self._factors(4)
        cut_a = single_circuit_cutoff(4, 1, self.P)
        cut_b = single_circuit_cutoff(3, 1, self.P)
        cut_c = single_circuit_cutoff(2, 1, self.P)
        expected = cut_a + a1 * 22 / 25 * (cut_b + b0 * 9 / 15 * cut_c)
        assert delta_total(branching_tree, (self.P,)) == pytest.approx(expected)
        assert bounds(branching_tree, (self.P,)).delta == pytest.approx(expected)

    def test_invariants(self, branching_tree):
        """0 <= p_L <= p_hat <= p_U <= 1 и η = σ_L + σ_U + δ."""
        for p in (1e-4, 1e-3, 1e-2, 0.1, 0.5, 0.9):
            result = bounds(branching_tree, (p,))
            assert 0.0 <= result.p_lower <= result.p_hat <= result.p_upper <= 1.0
            assert result.eta == pytest.approx(result.sigma_lower + result.sigma_upper + result.delta)
            assert result.p_upper == pytest.approx(result.p_lower + result.delta)

    def test_var_bounds(self, branching_tree):
        """Дисперсии согласуются с σ в BoundsResult."""
        var_l, var_u = var_bounds(branching_tree, (self.P,))
        result = bounds(branching_tree, (self.P,))
        assert np.sqrt(var_l) == pytest.approx(result.sigma_lower)
        assert np.sqrt(var_u) == pytest.approx(result.sigma_upper)
        assert var_l > 0

    def test_wrong_rate_count(self, branching_tree):
        """Число вероятностей должно совпадать с числом категорий."""
        with pytest.raises(ValueError):
            bounds(branching_tree, (0.1, 0.1))

    def test_empty_tree(self):
        """Пустое дерево: p_L = 0, p_U = 1."""
        tree = SampleTree("s", "A", {"A": (3,)}, ("p",))
        result = bounds(tree, (1e-3,))
        assert result.p_lower == 0.0
        assert result.p_upper == pytest.approx(1.0)

    def test_delta_node_for_missing_branch(self):
        """Неполный переход получает δ-ветвь 1 в верхней границе."""
        tree = SampleTree("s", "A", {"A": (2,), "B": (1,)}, ("p",))
        for _ in range(3):
            tree.record_shot([TraceStep("A", (1,), "B"), TraceStep("B", (0,), "NOFAIL")])
        upper = evaluation_tree(tree, (0.1,), upper=True)
        lower = evaluation_tree(tree, (0.1,), upper=False)
        (subset,) = upper.subsets
        assert len(subset.branches) == 2
        assert subset.branches[1].target == 1.0
        assert len(lower.subsets[0].branches) == 1
        # q = 1 для наблюдённой ветви: δ не добавляет к среднему, только к дисперсии
        assert circuit_moments(upper).variance > circuit_moments(lower).variance

    def test_hypothesis_shifts_counts(self, branching_tree):
        """Гипотетические счётчики меняют оценку только в указанном узле."""
        base = bounds(branching_tree, (self.P,))
        shifted = bounds(branching_tree, (self.P,), hypothesis=Hypothesis(counts={(("A",), (1,)): (4, 26)}))
        assert shifted.p_lower > base.p_lower
        opened = bounds(branching_tree, (self.P,), hypothesis=Hypothesis(opened={(("A",), (2,)): 0.5}))
        assert opened.delta < base.delta


class TestFaultTolerantBounds:
    """Тесты виртуальных подмножеств для t = 1."""

    def test_weights_up_to(self):
        """Векторы весов с ограниченной суммой."""
        assert weights_up_to((2, 3), 1) == [(0, 0), (0, 1), (1, 0)]
        assert weights_up_to((2,), -1) == []

    def test_minimal_fault_free_factor(self, branching_tree):
        """M0 - наименьший вес подмножества без ошибок."""
        assert minimal_fault_free_factor(branching_tree, (0.1,)) == pytest.approx(0.9 ** 4)

    @pytest.mark.parametrize("p", [1e-4, 1e-3, 1e-2])
    def test_virtual_weight_one(self, p):
        """Несэмплированный вес 1 оценивается как L·(1 - M0)."""
        tree = SampleTree("ft", "A", {"A": (5,)}, ("p",), ft_order=1, max_ft_length=4)
        for _ in range(10):
            tree.record_shot([TraceStep("A", (0,), "NOFAIL")])
        ft_value = 4 * (1 - (1 - p) ** 5)
        expected = binomial_factor(5, 1, p) * ft_value + single_circuit_cutoff(5, 1, p)
        result = bounds(tree, (p,))
        assert result.p_lower == 0.0
        assert result.p_upper == pytest.approx(expected)

    def test_upper_bound_is_second_order(self):
        """При t = 1 p_U убывает как p²."""
        tree = SampleTree("ft", "A", {"A": (5,)}, ("p",), ft_order=1, max_ft_length=4)
        tree.record_shot([TraceStep("A", (0,), "NOFAIL")])
        ratio = bounds(tree, (1e-4,)).p_upper / bounds(tree, (1e-5,)).p_upper
        assert ratio == pytest.approx(100, rel=0.01)

    def test_ft_value_is_clamped(self):
        """L·(1 - M0) не превышает 1, p_U не превышает 1."""
        tree = SampleTree("ft", "A", {"A": (5,)}, ("p",), ft_order=1, max_ft_length=1000)
        tree.record_shot([TraceStep("A", (0,), "NOFAIL")])
        assert bounds(tree, (0.5,)).p_upper <= 1.0


class TestVarianceExperiment:
    """Сравнение оценки дисперсии с разбросом повторных выборок."""

    RATES = {"A0": 0.4, "A1": 0.7, "B0": 0.2, "B1": 0.5, "C0": 0.1, "C1": 0.9}
    N = 2000

    def _tree(self, rng):
        n = self.N
        draw = {name: int(rng.binomial(n, q)) for name, q in self.RATES.items()}
        b_node = {"circuit": "B", "subsets": [
            {"weight": [0], "counts": _counts(FAIL=draw["B0"], NOFAIL=n - draw["B0"])},
            {"weight": [1], "counts": _counts(FAIL=draw["B1"], NOFAIL=n - draw["B1"])},
        ]}
        c_node = {"circuit": "C", "subsets": [
            {"weight": [0], "counts": _counts(FAIL=draw["C0"], NOFAIL=n - draw["C0"])},
            {"weight": [1], "counts": _counts(FAIL=draw["C1"], NOFAIL=n - draw["C1"])},
        ]}
        root = {"circuit": "A", "subsets": [
            {"weight": [0], "counts": _counts(NOFAIL=draw["A0"], B=n - draw["A0"]), "children": {"B": b_node}},
            {"weight": [1], "counts": _counts(FAIL=draw["A1"], C=n - draw["A1"]), "children": {"C": c_node}},
        ]}
        return SampleTree.from_dict({
            "protocol": "toy",
            "categories": ["p"],
            "circuit_counts": {"A": [1], "B": [1], "C": [1]},
            "shots": n,
            "root": root,
        })

    def test_variance_matches_repetitions(self):
        """Оценка Var[p_L] близка к эмпирической дисперсии по 1000 повторам."""
        rng = np.random.default_rng(2024)
        values = []
        predicted = []
        for _ in range(1000):
            tree = self._tree(rng)
            values.append(p_lower(tree, (0.5,)))
            predicted.append(var_bounds(tree, (0.5,))[0])
        assert np.mean(values) == pytest.approx(0.53, abs=0.005)
        assert np.mean(predicted) == pytest.approx(np.var(values, ddof=1), rel=0.2)
